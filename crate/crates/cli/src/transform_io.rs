//! Analog-transform serialization for inspection and test fixtures:
//! blocks as re/im arrays plus an alphabet descriptor.

use crate::CliError;
use hermit_core::transform::{Alphabet, AnalogTransform, TransformBlock};
use hermit_core::{CVector, Complex64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformDump {
    pub cluster_size: usize,
    pub alphabet: AlphabetDump,
    pub blocks: Vec<BlockDump>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlphabetDump {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDump {
    pub beta_re: f64,
    pub beta_im: f64,
    pub b_re: Vec<f64>,
    pub b_im: Vec<f64>,
    pub a_re: Vec<f64>,
    pub a_im: Vec<f64>,
}

fn alphabet_dump(a: &Alphabet) -> AlphabetDump {
    match *a {
        Alphabet::Unconstrained => AlphabetDump {
            kind: "unconstrained".into(),
            cardinality: None,
        },
        Alphabet::Phase { cardinality } => AlphabetDump {
            kind: "phase".into(),
            cardinality: Some(cardinality),
        },
        Alphabet::Quadrature { cardinality } => AlphabetDump {
            kind: "quadrature".into(),
            cardinality: Some(cardinality),
        },
    }
}

fn alphabet_from_dump(d: &AlphabetDump) -> Result<Alphabet, CliError> {
    match (d.kind.as_str(), d.cardinality) {
        ("unconstrained", None) => Ok(Alphabet::Unconstrained),
        ("phase", Some(cardinality)) => Ok(Alphabet::Phase { cardinality }),
        ("quadrature", Some(cardinality)) => Ok(Alphabet::Quadrature { cardinality }),
        _ => Err(CliError::Validation(format!(
            "invalid alphabet descriptor: kind '{}' with cardinality {:?}",
            d.kind, d.cardinality
        ))),
    }
}

pub fn dump_transform(t: &AnalogTransform) -> Result<String, CliError> {
    let alphabet = t
        .blocks
        .first()
        .map(|b| b.alphabet)
        .unwrap_or(Alphabet::Unconstrained);
    if t.blocks.iter().any(|b| b.alphabet != alphabet) {
        return Err(CliError::Validation(
            "transform blocks use mixed alphabets".into(),
        ));
    }
    let split = |v: &CVector| -> (Vec<f64>, Vec<f64>) {
        ((0..v.len()).map(|i| v[i].re).collect(), (0..v.len()).map(|i| v[i].im).collect())
    };
    let blocks = t
        .blocks
        .iter()
        .map(|blk| {
            let (b_re, b_im) = split(&blk.b);
            let (a_re, a_im) = split(&blk.a);
            BlockDump {
                beta_re: blk.beta.re,
                beta_im: blk.beta.im,
                b_re,
                b_im,
                a_re,
                a_im,
            }
        })
        .collect();
    let dump = TransformDump {
        cluster_size: t.cluster_size,
        alphabet: alphabet_dump(&alphabet),
        blocks,
    };
    serde_json::to_string_pretty(&dump)
        .map_err(|e| CliError::Io(format!("transform serialization: {e}")))
}

pub fn load_transform(text: &str) -> Result<AnalogTransform, CliError> {
    let dump: TransformDump = serde_json::from_str(text)
        .map_err(|e| CliError::Validation(format!("transform JSON: {e}")))?;
    let alphabet = alphabet_from_dump(&dump.alphabet)?;
    let s = dump.cluster_size;
    let mut blocks = Vec::with_capacity(dump.blocks.len());
    for (i, blk) in dump.blocks.iter().enumerate() {
        if blk.b_re.len() != s || blk.b_im.len() != s || blk.a_re.len() != s || blk.a_im.len() != s
        {
            return Err(CliError::Validation(format!(
                "block {i}: vector lengths must equal the cluster size {s}"
            )));
        }
        blocks.push(TransformBlock {
            beta: Complex64::new(blk.beta_re, blk.beta_im),
            b: CVector::from_fn(s, |k, _| Complex64::new(blk.b_re[k], blk.b_im[k])),
            a: CVector::from_fn(s, |k, _| Complex64::new(blk.a_re[k], blk.a_im[k])),
            alphabet,
        });
    }
    Ok(AnalogTransform {
        blocks,
        cluster_size: s,
    })
}
