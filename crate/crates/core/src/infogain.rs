//! Information gain between citation histograms.
//!
//! The gain of an input distribution Q relative to a reference P is
//!
//! ```text
//! ε(P, Q) = a · Σᵢ Pᵢ · ln(Pᵢ / Qᵢ)        (a ≥ 0, 0·ln(0/q) = 0)
//! ```
//!
//! equivalently `a · (U_P(Q) − U_P(P))`, the difference between how
//! unexpected the reference looks under the estimated distribution
//! (`U_P(Q) = −Σ Pᵢ ln Qᵢ`) and under its own (`U_P(P) = −Σ Pᵢ ln Pᵢ`),
//! with the single-event unexpectedness measure `h(p) = −ln p`. The gain is
//! nonnegative, zero exactly when P = Q, not symmetric, and reported in nats
//! by default; the scale constant folds in any other log base.
//!
//! The reference is the standard discipline and the input the publisher:
//! minimum gain means the most alike publisher.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::histogram::{align_support, CitationHistogram, HistogramError};
use crate::indicators::PublisherStats;

#[derive(Debug, Error)]
pub enum GainError {
    #[error("scale constant must be finite and non-negative, got {0}")]
    InvalidScale(f64),
    #[error("histograms are not on a common grid; apply align_support first")]
    NotAligned,
    #[error("both histograms are empty")]
    Empty,
    #[error("input has zero probability at bin {edge} where the reference does not, and the smoothing policy forbids intervention")]
    ZeroBin { edge: u64 },
    #[error("additive smoothing needs the input histogram's sample count, which is zero")]
    NoSampleCount,
    #[error("reference and input share no support")]
    DisjointSupport,
    #[error(transparent)]
    Align(#[from] HistogramError),
}

/// What to do when the input assigns zero probability to a bin the
/// reference occupies (the gain would otherwise be infinite).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoothingPolicy {
    /// Add ε₀ = 1/(2·n_samples(input)) to every input bin, renormalize.
    #[default]
    Additive,
    /// Refuse and return an error.
    ErrorOut,
    /// Drop bins outside the input's support and renormalize both sides.
    RestrictToCommonSupport,
}

/// Gain of one input against one reference, with its two unexpectedness
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoGainResult {
    pub reference: String,
    pub input: String,
    /// a · Σ P·ln(P/Q), in nats when a = 1.
    pub gain: f64,
    /// U_P(Q) = −Σ P·ln Q (cross term).
    pub unexpectedness_estimated: f64,
    /// U_P(P) = −Σ P·ln P (entropy of the reference).
    pub unexpectedness_true: f64,
    pub scale: f64,
    pub smoothing_applied: bool,
}

/// Compute ε(P, Q) for two histograms already on a common grid.
pub fn information_gain(
    reference: &CitationHistogram,
    input: &CitationHistogram,
    scale: f64,
    smoothing: SmoothingPolicy,
) -> Result<InfoGainResult, GainError> {
    if !scale.is_finite() || scale < 0.0 {
        return Err(GainError::InvalidScale(scale));
    }
    if reference.num_bins() == 0 && input.num_bins() == 0 {
        return Err(GainError::Empty);
    }
    if reference.bin_width() != input.bin_width()
        || reference.first_edge() != input.first_edge()
        || reference.num_bins() != input.num_bins()
    {
        return Err(GainError::NotAligned);
    }

    let p = reference.probabilities();
    let mut q = input.probabilities();

    let violation = p
        .iter()
        .zip(q.iter())
        .position(|(&pi, &qi)| pi > 0.0 && qi == 0.0);
    let mut smoothing_applied = false;
    let mut p = p;
    if let Some(idx) = violation {
        match smoothing {
            SmoothingPolicy::ErrorOut => {
                return Err(GainError::ZeroBin {
                    edge: input.edge(idx),
                });
            }
            SmoothingPolicy::Additive => {
                let n = input.n_samples();
                if n == 0 {
                    return Err(GainError::NoSampleCount);
                }
                let eps = 1.0 / (2.0 * n as f64);
                let denom = 1.0 + q.len() as f64 * eps;
                for qi in &mut q {
                    *qi = (*qi + eps) / denom;
                }
                smoothing_applied = true;
            }
            SmoothingPolicy::RestrictToCommonSupport => {
                let keep: Vec<usize> = (0..q.len()).filter(|&i| q[i] > 0.0).collect();
                let p_mass: f64 = keep.iter().map(|&i| p[i]).sum();
                if p_mass <= 0.0 {
                    return Err(GainError::DisjointSupport);
                }
                let q_mass: f64 = keep.iter().map(|&i| q[i]).sum();
                p = keep.iter().map(|&i| p[i] / p_mass).collect();
                q = keep.iter().map(|&i| q[i] / q_mass).collect();
                smoothing_applied = true;
            }
        }
    }

    let mut sum = 0.0;
    let mut cross = 0.0;
    let mut entropy = 0.0;
    for (&pi, &qi) in p.iter().zip(q.iter()) {
        if pi > 0.0 {
            sum += pi * (pi / qi).ln();
            cross -= pi * qi.ln();
            entropy -= pi * pi.ln();
        }
    }

    Ok(InfoGainResult {
        reference: reference.label().to_string(),
        input: input.label().to_string(),
        gain: scale * sum,
        unexpectedness_estimated: cross,
        unexpectedness_true: entropy,
        scale,
        smoothing_applied,
    })
}

/// Align each input against the reference and rank by ascending gain
/// (minimum gain — most alike — first), ties broken alphabetically.
/// Per-input failures are collected, not fatal.
pub fn rank_by_gain(
    reference: &CitationHistogram,
    inputs: &[(String, CitationHistogram)],
    scale: f64,
    smoothing: SmoothingPolicy,
) -> (Vec<InfoGainResult>, Vec<(String, GainError)>) {
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (label, hist) in inputs {
        let aligned = match align_support(reference, hist) {
            Ok(pair) => pair,
            Err(e) => {
                failures.push((label.clone(), GainError::from(e)));
                continue;
            }
        };
        match information_gain(&aligned.0, &aligned.1, scale, smoothing) {
            Ok(mut result) => {
                result.input = label.clone();
                results.push(result);
            }
            Err(e) => failures.push((label.clone(), e)),
        }
    }
    results.sort_by(|a, b| {
        a.gain
            .total_cmp(&b.gain)
            .then_with(|| a.input.cmp(&b.input))
    });
    (results, failures)
}

/// Delimited ranking export. Publishers on the exclusion list keep their
/// row but carry the `excluded` marker.
pub fn ranking_table(
    results: &[InfoGainResult],
    stats: &[PublisherStats],
    excluded: &BTreeSet<String>,
) -> String {
    let by_label: BTreeMap<&str, &PublisherStats> =
        stats.iter().map(|s| (s.publisher.as_str(), s)).collect();
    let mut out =
        String::from("rank,label,gain,citation_average,nr_bc,smoothing_applied,excluded\n");
    for (i, r) in results.iter().enumerate() {
        let (avg, nr) = by_label
            .get(r.input.as_str())
            .map(|s| (format!("{}", s.citation_average), s.nr_bc.to_string()))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i + 1,
            r.input,
            r.gain,
            avg,
            nr,
            u8::from(r.smoothing_applied),
            u8::from(excluded.contains(&r.input)),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::CitationHistogram;

    fn hist(label: &str, counts: &[u64]) -> CitationHistogram {
        CitationHistogram::from_counts(label, 0, 1, counts).unwrap()
    }

    /// Direct-summation check kept independent of the implementation: terms
    /// are formed from raw counts and accumulated with Neumaier
    /// compensation.
    fn kl_oracle(p_counts: &[u64], q_counts: &[u64]) -> f64 {
        let np: u64 = p_counts.iter().sum();
        let nq: u64 = q_counts.iter().sum();
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (&cp, &cq) in p_counts.iter().zip(q_counts.iter()) {
            if cp == 0 {
                continue;
            }
            let pi = cp as f64 / np as f64;
            let term = pi * ((cp as f64 * nq as f64) / (np as f64 * cq as f64)).ln();
            let t = sum + term;
            comp += if sum.abs() >= term.abs() {
                (sum - t) + term
            } else {
                (term - t) + sum
            };
            sum = t;
        }
        sum + comp
    }

    #[test]
    fn identical_histograms_have_zero_gain() {
        let p = hist("p", &[3, 5, 2, 7]);
        let r = information_gain(&p, &p, 1.0, SmoothingPolicy::ErrorOut).unwrap();
        assert_eq!(r.gain, 0.0);
        assert!((r.unexpectedness_estimated - r.unexpectedness_true).abs() < 1e-15);
    }

    #[test]
    fn two_term_hand_value() {
        let p = hist("p", &[1, 1]);
        let q = hist("q", &[1, 3]);
        let r = information_gain(&p, &q, 1.0, SmoothingPolicy::ErrorOut).unwrap();
        // 0.5·ln 2 + 0.5·ln(2/3), evaluated independently at high precision
        assert!((r.gain - 0.14384103622589045).abs() < 1e-15);
    }

    #[test]
    fn decomposition_holds() {
        let p = hist("p", &[2, 3, 5]);
        let q = hist("q", &[4, 1, 5]);
        let r = information_gain(&p, &q, 1.0, SmoothingPolicy::ErrorOut).unwrap();
        let via_components = r.scale * (r.unexpectedness_estimated - r.unexpectedness_true);
        assert!((r.gain - via_components).abs() <= 1e-12);
    }

    #[test]
    fn linear_in_scale() {
        let p = hist("p", &[2, 3, 5]);
        let q = hist("q", &[4, 1, 5]);
        let one = information_gain(&p, &q, 1.0, SmoothingPolicy::ErrorOut).unwrap();
        let two = information_gain(&p, &q, 2.0, SmoothingPolicy::ErrorOut).unwrap();
        assert_eq!(two.gain, 2.0 * one.gain);
    }

    #[test]
    fn asymmetry_witness() {
        let p = hist("p", &[9, 1]);
        let q = hist("q", &[5, 5]);
        let pq = information_gain(&p, &q, 1.0, SmoothingPolicy::ErrorOut).unwrap();
        let qp = information_gain(&q, &p, 1.0, SmoothingPolicy::ErrorOut).unwrap();
        assert!((pq.gain - qp.gain).abs() > 0.01);
    }

    #[test]
    fn negative_scale_rejected() {
        let p = hist("p", &[1, 1]);
        assert!(matches!(
            information_gain(&p, &p, -1.0, SmoothingPolicy::Additive),
            Err(GainError::InvalidScale(_))
        ));
    }

    #[test]
    fn misaligned_grids_rejected() {
        let p = hist("p", &[1, 1, 1]);
        let q = hist("q", &[1, 1]);
        assert!(matches!(
            information_gain(&p, &q, 1.0, SmoothingPolicy::Additive),
            Err(GainError::NotAligned)
        ));
    }

    #[test]
    fn zero_bin_policies() {
        let p = hist("p", &[1, 1, 2]);
        let q = hist("q", &[2, 2, 0]);
        assert!(matches!(
            information_gain(&p, &q, 1.0, SmoothingPolicy::ErrorOut),
            Err(GainError::ZeroBin { edge: 2 })
        ));

        let smoothed = information_gain(&p, &q, 1.0, SmoothingPolicy::Additive).unwrap();
        assert!(smoothed.smoothing_applied);
        assert!(smoothed.gain.is_finite());
        assert!(smoothed.gain > 0.0);

        let restricted =
            information_gain(&p, &q, 1.0, SmoothingPolicy::RestrictToCommonSupport).unwrap();
        assert!(restricted.smoothing_applied);
        assert!(restricted.gain.is_finite());
    }

    #[test]
    fn no_intervention_flag_without_zero_bins() {
        let p = hist("p", &[1, 1]);
        let q = hist("q", &[1, 3]);
        let r = information_gain(&p, &q, 1.0, SmoothingPolicy::Additive).unwrap();
        assert!(!r.smoothing_applied);
    }

    #[test]
    fn ranking_puts_identical_input_first() {
        let reference = hist("D", &[5, 3, 2]);
        let inputs = vec![
            ("Y".to_string(), hist("Y", &[2, 5, 3])),
            ("X".to_string(), hist("X", &[5, 3, 2])),
        ];
        let (results, failures) = rank_by_gain(&reference, &inputs, 1.0, SmoothingPolicy::Additive);
        assert!(failures.is_empty());
        assert_eq!(results[0].input, "X");
        assert_eq!(results[0].gain, 0.0);
        assert!(results[1].gain > 0.0);
    }

    #[test]
    fn ranking_orders_nested_perturbations() {
        // three synthetic inputs at increasing distance from the reference,
        // where the gain ordering is verified by direct summation
        let reference = hist("D", &[40, 30, 20, 10]);
        let near = [42u64, 29, 19, 10];
        let mid = [50u64, 25, 15, 10];
        let far = [70u64, 15, 10, 5];
        let inputs = vec![
            ("far".to_string(), hist("far", &far)),
            ("near".to_string(), hist("near", &near)),
            ("mid".to_string(), hist("mid", &mid)),
        ];
        let (results, failures) = rank_by_gain(&reference, &inputs, 1.0, SmoothingPolicy::ErrorOut);
        assert!(failures.is_empty());
        let labels: Vec<&str> = results.iter().map(|r| r.input.as_str()).collect();
        assert_eq!(labels, vec!["near", "mid", "far"]);
        let p = [40u64, 30, 20, 10];
        assert!(kl_oracle(&p, &near) < kl_oracle(&p, &mid));
        assert!(kl_oracle(&p, &mid) < kl_oracle(&p, &far));
        for (r, counts) in results.iter().zip([near, mid, far].iter()) {
            assert!((r.gain - kl_oracle(&p, counts)).abs() <= 1e-12);
        }
    }

    #[test]
    fn ranking_collects_failures() {
        let reference = hist("D", &[5, 3, 2]);
        let bad = CitationHistogram::from_counts("wide", 0, 2, &[1, 1]).unwrap();
        let inputs = vec![
            ("ok".to_string(), hist("ok", &[5, 3, 2])),
            ("wide".to_string(), bad),
        ];
        let (results, failures) = rank_by_gain(&reference, &inputs, 1.0, SmoothingPolicy::Additive);
        assert_eq!(results.len(), 1);
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].0, "wide");
    }

    #[test]
    fn exhaustive_small_histograms_match_oracle() {
        // all count vectors over 4 bins summing to 8 (probabilities on the
        // 1/8 grid); reference support must sit inside input support
        let mut vectors = Vec::new();
        for a in 0..=8u64 {
            for b in 0..=8 - a {
                for c in 0..=8 - a - b {
                    vectors.push([a, b, c, 8 - a - b - c]);
                }
            }
        }
        let mut checked = 0u64;
        for p_counts in &vectors {
            for q_counts in &vectors {
                let compatible = p_counts
                    .iter()
                    .zip(q_counts.iter())
                    .all(|(&cp, &cq)| cp == 0 || cq > 0);
                if !compatible {
                    continue;
                }
                let p = hist("p", p_counts);
                let q = hist("q", q_counts);
                let r = information_gain(&p, &q, 1.0, SmoothingPolicy::ErrorOut).unwrap();
                assert!(r.gain >= 0.0);
                assert!((r.gain - kl_oracle(p_counts, q_counts)).abs() <= 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 9_000, "checked only {checked} pairs");
    }

    #[test]
    fn ranking_table_marks_exclusions() {
        let reference = hist("D", &[5, 3, 2]);
        let inputs = vec![
            ("A".to_string(), hist("A", &[5, 3, 2])),
            ("B".to_string(), hist("B", &[2, 5, 3])),
        ];
        let (results, _) = rank_by_gain(&reference, &inputs, 1.0, SmoothingPolicy::Additive);
        let excluded = BTreeSet::from(["B".to_string()]);
        let table = ranking_table(&results, &[], &excluded);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[1].starts_with("1,A,0"));
        assert!(lines[1].ends_with(",0,0"));
        assert!(lines[2].starts_with("2,B,"));
        assert!(lines[2].ends_with(",0,1"));
    }
}
