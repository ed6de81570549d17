//! The fixed collection of norms used by the validation suites.

use crate::norm::NormSpec;
use crate::vec2::Mat2;

/// Matrix used for the pushforward copy of every base norm.
pub const PUSH_MATRIX: Mat2 = Mat2::new(1.3, 0.4, -0.2, 0.9);

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub spec: NormSpec,
}

/// The nine base norms: `l1, l1.5, l2, l3, linf`, hexagonal, regular 12-gon,
/// two-disk lens and six-disk intersection.
pub fn base_norms() -> Vec<CorpusEntry> {
    [
        ("l1", NormSpec::p(1.0)),
        ("l1.5", NormSpec::p(1.5)),
        ("l2", NormSpec::p(2.0)),
        ("l3", NormSpec::p(3.0)),
        ("linf", NormSpec::p_inf()),
        ("hexagonal", NormSpec::Hexagonal),
        ("12-gon", NormSpec::regular_polygon(12)),
        ("lens", NormSpec::symmetric_disks(2, 0.5, 1.2)),
        ("six-disk", NormSpec::symmetric_disks(6, 0.5, 1.2)),
    ]
    .into_iter()
    .map(|(name, spec)| CorpusEntry {
        name: name.to_string(),
        spec,
    })
    .collect()
}

/// Base norms followed by their pushforwards under [`PUSH_MATRIX`].
pub fn corpus() -> Vec<CorpusEntry> {
    let base = base_norms();
    let pushed: Vec<CorpusEntry> = base
        .iter()
        .map(|e| CorpusEntry {
            name: format!("push-{}", e.name),
            spec: NormSpec::pushforward(e.spec.clone(), PUSH_MATRIX),
        })
        .collect();
    base.into_iter().chain(pushed).collect()
}

pub fn by_name(name: &str) -> Option<CorpusEntry> {
    corpus().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::Norm;

    #[test]
    fn every_entry_validates() {
        let c = corpus();
        assert_eq!(c.len(), 18);
        for e in &c {
            Norm::new(e.spec.clone()).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        }
        assert!(by_name("push-lens").is_some());
    }
}
