//! Functions sampled on a grid, with the `t,value` CSV export.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(t.len(), values.len());
        SampledFunction { t, values }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.values.iter().copied())
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Writes `t,value` rows with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "value"])?;
        for (t, v) in self.iter() {
            out.write_record([fmt_f64(t), fmt_f64(v)])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal representation; CSV payloads stay byte-stable.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
