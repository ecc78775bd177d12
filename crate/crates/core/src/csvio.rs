//! CSV emission and parsing for the artifact's flat-file interfaces.
//!
//! All numeric output uses 17 significant digits so that values round-trip
//! through text exactly.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::matrix::StochasticMatrix;
use crate::projection::BirthDeathChain;
use crate::sim::{HittingSample, Trajectory};

/// 17 significant digits; round-trips every finite f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Csv(format!("bad float `{s}`: {e}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|e| Error::Csv(format!("bad integer `{s}`: {e}")))
}

/// `# dim=<n>` header then one `state,probability` row per state.
pub fn distribution_to_csv(d: &Distribution) -> String {
    let mut out = format!("# dim={}\nstate,probability\n", d.len());
    for (i, &p) in d.as_slice().iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f64(p)));
    }
    out
}

pub fn distribution_from_csv(text: &str) -> Result<Distribution> {
    let mut dim = None;
    let mut values = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line == "state,probability" {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("dim=") {
                dim = Some(parse_usize(v)?);
            }
            continue;
        }
        let (idx, val) = line
            .split_once(',')
            .ok_or_else(|| Error::Csv(format!("expected `state,probability`: `{line}`")))?;
        let idx = parse_usize(idx)?;
        if idx != values.len() {
            return Err(Error::Csv(format!(
                "state {idx} out of order (expected {})",
                values.len()
            )));
        }
        values.push(parse_f64(val)?);
    }
    if let Some(d) = dim {
        if d != values.len() {
            return Err(Error::Csv(format!(
                "header dim {d} but {} rows",
                values.len()
            )));
        }
    }
    Distribution::new_lenient(values, 1e-9)
}

/// `# dim=<n>` header then the dense matrix row-major, one row per line.
pub fn matrix_to_csv(m: &StochasticMatrix) -> String {
    let mut out = format!("# dim={}\n", m.dim());
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<StochasticMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(parse_f64)
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Csv("matrix rows of unequal length".into()));
    }
    StochasticMatrix::new(dim, rows.into_iter().flatten().collect())
}

/// `k,p,q,r,label` rows describing a birth-and-death rate profile.
pub fn bd_chain_to_csv(chain: &BirthDeathChain) -> String {
    let mut out = String::from("k,p,q,r,label\n");
    for k in 0..chain.states() {
        out.push_str(&format!(
            "{k},{},{},{},{}\n",
            fmt_f64(chain.up(k)),
            fmt_f64(chain.down(k)),
            fmt_f64(chain.hold(k)),
            fmt_f64(chain.label(k)),
        ));
    }
    out
}

pub fn bd_chain_from_csv(text: &str) -> Result<BirthDeathChain> {
    let mut up = Vec::new();
    let mut down = Vec::new();
    let mut labels = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("k,") {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Csv(format!("expected 5 fields: `{line}`")));
        }
        let k = parse_usize(parts[0])?;
        if k != up.len() {
            return Err(Error::Csv(format!("state {k} out of order")));
        }
        up.push(parse_f64(parts[1])?);
        down.push(parse_f64(parts[2])?);
        labels.push(parse_f64(parts[4])?);
    }
    let identity_labels = labels.iter().enumerate().all(|(k, &l)| l == k as f64);
    BirthDeathChain::new(up, down, if identity_labels { None } else { Some(labels) })
}

/// Drift curves: `t,tv`.
pub fn curve_to_csv(curve: &[f64]) -> String {
    let mut out = String::from("t,tv\n");
    for (t, &v) in curve.iter().enumerate() {
        out.push_str(&format!("{t},{}\n", fmt_f64(v)));
    }
    out
}

/// Hitting-time CDFs: `t,prob`.
pub fn cdf_to_csv(cdf: &[f64]) -> String {
    let mut out = String::from("t,prob\n");
    for (t, &v) in cdf.iter().enumerate() {
        out.push_str(&format!("{t},{}\n", fmt_f64(v)));
    }
    out
}

/// Trajectory snapshots: `replica,t,stateIndex`.
pub fn trajectories_to_csv(trajectories: &[Trajectory]) -> String {
    let mut out = String::from("replica,t,stateIndex\n");
    for tr in trajectories {
        for &(t, s) in &tr.snapshots {
            out.push_str(&format!("{},{t},{s}\n", tr.replica));
        }
    }
    out
}

/// Hitting-time samples: `replica,tau,censored`.
pub fn hitting_samples_to_csv(samples: &[HittingSample]) -> String {
    let mut out = String::from("replica,tau,censored\n");
    for (r, s) in samples.iter().enumerate() {
        out.push_str(&format!(
            "{r},{},{}\n",
            s.time(),
            if s.is_censored() { 1 } else { 0 }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::magnetization_chain;

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[
            0.0,
            1.0,
            1.0 / 3.0,
            2.0f64.powi(-52),
            0.1 + 0.2,
            1.0 / (1.0 + 20.0f64.exp()),
            123_456_789.123_456_78,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(x, back, "{s}");
        }
    }

    #[test]
    fn distribution_round_trip() {
        let d = Distribution::new(vec![0.25, 0.5, 0.25]).unwrap();
        let text = distribution_to_csv(&d);
        let back = distribution_from_csv(&text).unwrap();
        assert_eq!(d.as_slice(), back.as_slice());
        assert!(distribution_from_csv("# dim=2\nstate,probability\n0,0.5\n").is_err());
    }

    #[test]
    fn bd_chain_round_trip_preserves_rates_and_labels() {
        let chain = magnetization_chain(9, 1.25).unwrap();
        let text = bd_chain_to_csv(&chain);
        let back = bd_chain_from_csv(&text).unwrap();
        assert_eq!(chain, back);
    }

    #[test]
    fn matrix_round_trip() {
        let m = StochasticMatrix::new(2, vec![0.25, 0.75, 0.5, 0.5]).unwrap();
        let back = matrix_from_csv(&matrix_to_csv(&m)).unwrap();
        assert_eq!(m.as_slice(), back.as_slice());
    }
}
