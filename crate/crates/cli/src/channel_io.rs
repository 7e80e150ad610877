//! Channel dump/load as a JSON document:
//!
//! ```json
//! {"B": 2, "U": 1, "H_re": [[..]], "H_im": [[..]],
//!  "hJ_re": [..], "hJ_im": [..], "Es": 1.0, "Ej": 0.5, "N0": 0.1}
//! ```
//!
//! Matrices are row-major with rows indexed by antenna.

use crate::CliError;
use hermit_core::channel::ChannelRealization;
use hermit_core::{CMatrix, CVector, Complex64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDump {
    #[serde(rename = "B")]
    pub num_antennas: usize,
    #[serde(rename = "U")]
    pub num_users: usize,
    #[serde(rename = "H_re")]
    pub h_re: Vec<Vec<f64>>,
    #[serde(rename = "H_im")]
    pub h_im: Vec<Vec<f64>>,
    #[serde(rename = "hJ_re")]
    pub hj_re: Vec<f64>,
    #[serde(rename = "hJ_im")]
    pub hj_im: Vec<f64>,
    #[serde(rename = "Es")]
    pub es: f64,
    #[serde(rename = "Ej")]
    pub ej: f64,
    #[serde(rename = "N0")]
    pub n0: f64,
}

pub fn dump_channel(chan: &ChannelRealization) -> String {
    let b = chan.num_antennas();
    let u = chan.num_users();
    let row = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..b)
            .map(|i| (0..u).map(|j| f(&chan.h[(i, j)])).collect())
            .collect()
    };
    let dump = ChannelDump {
        num_antennas: b,
        num_users: u,
        h_re: row(|z| z.re),
        h_im: row(|z| z.im),
        hj_re: (0..b).map(|i| chan.h_j[i].re).collect(),
        hj_im: (0..b).map(|i| chan.h_j[i].im).collect(),
        es: chan.es,
        ej: chan.ej,
        n0: chan.n0,
    };
    serde_json::to_string_pretty(&dump).expect("channel serialization cannot fail")
}

pub fn load_channel(text: &str) -> Result<ChannelRealization, CliError> {
    let dump: ChannelDump =
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("channel JSON: {e}")))?;
    let (b, u) = (dump.num_antennas, dump.num_users);
    for (name, rows) in [("H_re", &dump.h_re), ("H_im", &dump.h_im)] {
        if rows.len() != b || rows.iter().any(|r| r.len() != u) {
            return Err(CliError::Validation(format!(
                "{name} must be a {b}x{u} row-major matrix"
            )));
        }
    }
    if dump.hj_re.len() != b || dump.hj_im.len() != b {
        return Err(CliError::Validation(format!(
            "hJ_re and hJ_im must have length {b}"
        )));
    }
    let h = CMatrix::from_fn(b, u, |i, j| Complex64::new(dump.h_re[i][j], dump.h_im[i][j]));
    let h_j = CVector::from_fn(b, |i, _| Complex64::new(dump.hj_re[i], dump.hj_im[i]));
    Ok(ChannelRealization {
        h,
        h_j,
        es: dump.es,
        ej: dump.ej,
        n0: dump.n0,
    })
}
