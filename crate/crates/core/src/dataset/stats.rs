//! Corpus composition summaries.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{AttributeType, ObjectType, RelationType};
use crate::record::PuzzleRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub count: usize,
    pub fraction: f64,
}

/// Counts by structure size, relation, attribute and object. A record counts
/// once per distinct relation (attribute, object) it uses, so those
/// fractions can sum to more than one.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub records: usize,
    pub by_structure_size: BTreeMap<usize, Breakdown>,
    pub by_relation: BTreeMap<String, Breakdown>,
    pub by_attribute: BTreeMap<String, Breakdown>,
    pub by_object: BTreeMap<String, Breakdown>,
    pub answer_histogram: [usize; 8],
    pub distracting: usize,
    pub non_distracting: usize,
}

fn tally<K: Ord + Clone>(counts: &BTreeMap<K, usize>, total: usize) -> BTreeMap<K, Breakdown> {
    counts
        .iter()
        .map(|(k, c)| {
            let fraction = if total == 0 { 0.0 } else { *c as f64 / total as f64 };
            (k.clone(), Breakdown { count: *c, fraction })
        })
        .collect()
}

pub fn corpus_stats<'a>(records: impl IntoIterator<Item = &'a PuzzleRecord>) -> CorpusStats {
    let mut sizes = BTreeMap::new();
    let mut relations: BTreeMap<String, usize> = BTreeMap::new();
    let mut attributes: BTreeMap<String, usize> = BTreeMap::new();
    let mut objects: BTreeMap<String, usize> = BTreeMap::new();
    let mut stats = CorpusStats::default();
    for r in records {
        stats.records += 1;
        *sizes.entry(r.structure.len()).or_insert(0) += 1;
        let mut rs: Vec<RelationType> = r.structure.iter().map(|t| t.relation).collect();
        let mut attrs: Vec<AttributeType> = r.structure.iter().map(|t| t.attribute).collect();
        let mut objs: Vec<ObjectType> = r.structure.iter().map(|t| t.object).collect();
        rs.sort();
        rs.dedup();
        attrs.sort();
        attrs.dedup();
        objs.sort();
        objs.dedup();
        for x in rs {
            *relations.entry(x.name().to_string()).or_insert(0) += 1;
        }
        for x in attrs {
            *attributes.entry(x.name().to_string()).or_insert(0) += 1;
        }
        for x in objs {
            *objects.entry(x.name().to_string()).or_insert(0) += 1;
        }
        if let Some(slot) = stats.answer_histogram.get_mut(r.answer_index as usize) {
            *slot += 1;
        }
        if r.distracting {
            stats.distracting += 1;
        } else {
            stats.non_distracting += 1;
        }
    }
    stats.by_structure_size = tally(&sizes, stats.records);
    stats.by_relation = tally(&relations, stats.records);
    stats.by_attribute = tally(&attributes, stats.records);
    stats.by_object = tally(&objects, stats.records);
    stats
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "records: {}", self.records)?;
        let section = |f: &mut fmt::Formatter<'_>, title: &str, rows: Vec<(String, &Breakdown)>| {
            writeln!(f, "{title}:")?;
            for (k, b) in rows {
                writeln!(f, "  {k:<18} {:>8} {:>7.2}%", b.count, 100.0 * b.fraction)?;
            }
            Ok(())
        };
        section(f, "structure size", self.by_structure_size.iter().map(|(k, b)| (k.to_string(), b)).collect())?;
        section(f, "relation", self.by_relation.iter().map(|(k, b)| (k.clone(), b)).collect())?;
        section(f, "attribute", self.by_attribute.iter().map(|(k, b)| (k.clone(), b)).collect())?;
        section(f, "object", self.by_object.iter().map(|(k, b)| (k.clone(), b)).collect())?;
        writeln!(f, "answer index:")?;
        for (i, c) in self.answer_histogram.iter().enumerate() {
            let pct = if self.records == 0 { 0.0 } else { 100.0 * *c as f64 / self.records as f64 };
            writeln!(f, "  {i:<18} {c:>8} {pct:>7.2}%")?;
        }
        writeln!(f, "distracting: {}  non-distracting: {}", self.distracting, self.non_distracting)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{Generator, GeneratorConfig};
    use crate::regimes::{build_holdout_plan, RegimeId, Split};

    #[test]
    fn one_record_per_size() {
        let mut recs = Vec::new();
        for len in 1..=4 {
            let mut weights = [0; 4];
            weights[len - 1] = 1;
            let g = Generator::new(build_holdout_plan(0), GeneratorConfig { size_weights: weights, human_readable: false });
            recs.push(g.generate_symbolic(len as u64, RegimeId::Neutral, Split::Train, false).unwrap());
        }
        let s = corpus_stats(&recs);
        assert_eq!(s.records, 4);
        for len in 1..=4 {
            assert_eq!(s.by_structure_size[&len].count, 1);
        }
        assert_eq!(s.answer_histogram.iter().sum::<usize>(), 4);
        assert_eq!(s.non_distracting, 4);
    }

    #[test]
    fn line_only_corpus() {
        let g = Generator::new(build_holdout_plan(0), GeneratorConfig::default());
        let recs: Vec<PuzzleRecord> = (0..400)
            .filter_map(|seed| g.generate_symbolic(seed, RegimeId::Neutral, Split::Train, true).ok())
            .filter(|r| r.structure.iter().all(|t| t.object == ObjectType::Line))
            .take(10)
            .collect();
        assert_eq!(recs.len(), 10);
        let s = corpus_stats(&recs);
        assert_eq!(s.by_object.len(), 1);
        assert_eq!(s.by_object["line"].fraction, 1.0);
        assert!(s.to_string().contains("line"));
    }

    #[test]
    fn empty_corpus() {
        let s = corpus_stats(std::iter::empty());
        assert_eq!(s.records, 0);
        assert!(s.by_relation.is_empty());
    }
}
