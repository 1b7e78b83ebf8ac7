use serde::{Deserialize, Serialize};

use crate::info::SymbolString;

/// Parametric or explicit description of a codebook's member set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BookSpec {
    /// Every string over the support of the target.
    FullSupport { n: u32 },
    /// Binary strings with at most `k` occurrences of the less likely letter.
    WeightThreshold { n: u32, k: u32 },
    /// Binary strings with at least `k` occurrences of the less likely letter.
    MinWeight { n: u32, k: u32 },
    TypicalSet { n: u32, eps: f64 },
    /// Union of whole type classes.
    Types { n: u32, types: Vec<Vec<u32>> },
    Explicit { strings: Vec<SymbolString> },
    /// The first `len` strings of `base` in canonical order.
    Truncated { base: Box<BookSpec>, len: u64 },
}

/// JSON document form: the spec fields plus the target pmf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BookDoc {
    #[serde(flatten)]
    pub spec: BookSpec,
    pub pmf: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shapes() {
        let doc: BookDoc =
            serde_json::from_str(r#"{"kind":"weight_threshold","n":10,"k":1,"pmf":[0.11,0.89]}"#).unwrap();
        assert_eq!(doc.spec, BookSpec::WeightThreshold { n: 10, k: 1 });
        let doc: BookDoc = serde_json::from_str(
            r#"{"kind":"truncated","base":{"kind":"full_support","n":4},"len":3,"pmf":[0.5,0.5]}"#,
        )
        .unwrap();
        assert!(matches!(doc.spec, BookSpec::Truncated { len: 3, .. }));
        let doc: BookDoc =
            serde_json::from_str(r#"{"kind":"explicit","strings":["011","110"],"pmf":[0.5,0.5]}"#).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains(r#""strings":["011","110"]"#));
    }
}
