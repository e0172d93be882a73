use serde::Serialize;

use crate::modular_gl2z::dim_s2_gamma1;
use crate::numberfields::is_prime;

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceEntry {
    pub key: String,
    pub value: u64,
    /// Imported entries are data only unless `--use-imported` is given.
    pub imported: bool,
    pub provenance: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceFacts {
    pub entries: Vec<ReferenceEntry>,
}

const K3_PROVENANCE: &str = "imported: rank of K3 of the p-th cyclotomic field tensored with Q, (p-1)/2 (Borel)";
const S2_PROVENANCE: &str = "computed: genus of X1(p) from index, elliptic points and cusps (dim_s2_gamma1)";

impl ReferenceFacts {
    pub fn bundled() -> ReferenceFacts {
        let mut entries = Vec::new();
        for p in (3..=13u64).filter(|&p| is_prime(p)) {
            entries.push(ReferenceEntry { key: format!("dim_k3_q_zeta_{}", p), value: (p - 1) / 2, imported: true, provenance: K3_PROVENANCE });
            entries.push(ReferenceEntry { key: format!("dim_s2_gamma1_{}", p), value: dim_s2_gamma1(p), imported: false, provenance: S2_PROVENANCE });
        }
        ReferenceFacts { entries }
    }

    /// Value usable as an oracle: imported entries need `use_imported`.
    pub fn oracle(&self, key: &str, use_imported: bool) -> Option<u64> {
        self.entries.iter().find(|e| e.key == key && (use_imported || !e.imported)).map(|e| e.value)
    }

    pub fn get(&self, key: &str) -> Option<&ReferenceEntry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imported_entries_are_gated() {
        let r = ReferenceFacts::bundled();
        assert_eq!(r.oracle("dim_k3_q_zeta_11", false), None);
        assert_eq!(r.oracle("dim_k3_q_zeta_11", true), Some(5));
        assert_eq!(r.oracle("dim_s2_gamma1_11", false), Some(1));
        assert!(r.entries.iter().all(|e| !e.provenance.is_empty()));
    }
}
