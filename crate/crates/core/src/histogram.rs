//! Citation-probability histograms over half-open integer bins `[l, l + Δl)`.
//!
//! Histograms keep exact per-bin weights (observation counts, when built
//! from samples) and derive probabilities on demand, so repeated reads never
//! accumulate renormalization drift.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HistogramError {
    #[error("bin width must be at least 1")]
    ZeroBinWidth,
    #[error("max_bin {max_bin} is not a multiple of bin width {bin_width}")]
    MisalignedMaxBin { max_bin: u64, bin_width: u64 },
    #[error("first edge {0} is not a multiple of bin width {1}")]
    MisalignedFirstEdge(u64, u64),
    #[error("cannot build a histogram from an empty sample")]
    EmptySample,
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error("negative or non-finite weight at bin {0}")]
    InvalidWeight(usize),
    #[error("all bin weights are zero")]
    ZeroMass,
    #[error("bin widths differ: {0} vs {1}")]
    BinWidthMismatch(u64, u64),
    #[error("overflow bins are incompatible between the two histograms")]
    OverflowMismatch,
}

/// How raw citation counts map onto bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BinningSpec {
    /// Bin width Δl. Unit bins by default.
    pub bin_width: u64,
    /// Optional cap: observations at or above it land in an overflow bin
    /// when `include_overflow` is set, and are dropped from the sample
    /// otherwise (lossy truncation; normalization is preserved over the
    /// retained observations).
    pub max_bin: Option<u64>,
    pub include_overflow: bool,
}

impl Default for BinningSpec {
    fn default() -> Self {
        BinningSpec {
            bin_width: 1,
            max_bin: None,
            include_overflow: false,
        }
    }
}

impl BinningSpec {
    pub fn validate(&self) -> Result<(), HistogramError> {
        if self.bin_width == 0 {
            return Err(HistogramError::ZeroBinWidth);
        }
        if let Some(max_bin) = self.max_bin {
            if max_bin == 0 || !max_bin.is_multiple_of(self.bin_width) {
                return Err(HistogramError::MisalignedMaxBin {
                    max_bin,
                    bin_width: self.bin_width,
                });
            }
        }
        Ok(())
    }
}

/// A discrete probability distribution over citation-count bins.
///
/// The last bin is unbounded above when `has_overflow()` is true; its lower
/// edge doubles as its representative value for mean reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationHistogram {
    label: String,
    first_edge: u64,
    bin_width: u64,
    weights: Vec<f64>,
    weight_total: f64,
    n_samples: u64,
    count_backed: bool,
    overflow: bool,
}

impl CitationHistogram {
    /// Build a histogram from explicit per-bin observation counts starting
    /// at `first_edge`.
    pub fn from_counts(
        label: impl Into<String>,
        first_edge: u64,
        bin_width: u64,
        counts: &[u64],
    ) -> Result<Self, HistogramError> {
        if bin_width == 0 {
            return Err(HistogramError::ZeroBinWidth);
        }
        if counts.is_empty() {
            return Err(HistogramError::NoBins);
        }
        if !first_edge.is_multiple_of(bin_width) {
            return Err(HistogramError::MisalignedFirstEdge(first_edge, bin_width));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(HistogramError::ZeroMass);
        }
        Ok(CitationHistogram {
            label: label.into(),
            first_edge,
            bin_width,
            weights: counts.iter().map(|&c| c as f64).collect(),
            weight_total: total as f64,
            n_samples: total,
            count_backed: true,
            overflow: false,
        })
    }

    /// Build a histogram directly from probabilities (or any nonnegative
    /// weights; they are normalized on read). `n_samples` records how many
    /// underlying observations the distribution stands for, if any.
    pub fn from_probabilities(
        label: impl Into<String>,
        first_edge: u64,
        bin_width: u64,
        probabilities: &[f64],
        n_samples: u64,
    ) -> Result<Self, HistogramError> {
        if bin_width == 0 {
            return Err(HistogramError::ZeroBinWidth);
        }
        if probabilities.is_empty() {
            return Err(HistogramError::NoBins);
        }
        if !first_edge.is_multiple_of(bin_width) {
            return Err(HistogramError::MisalignedFirstEdge(first_edge, bin_width));
        }
        for (i, &p) in probabilities.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(HistogramError::InvalidWeight(i));
            }
        }
        let total: f64 = probabilities.iter().sum();
        if total <= 0.0 {
            return Err(HistogramError::ZeroMass);
        }
        Ok(CitationHistogram {
            label: label.into(),
            first_edge,
            bin_width,
            weights: probabilities.to_vec(),
            weight_total: total,
            n_samples,
            count_backed: false,
            overflow: false,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bin_width(&self) -> u64 {
        self.bin_width
    }

    pub fn first_edge(&self) -> u64 {
        self.first_edge
    }

    pub fn num_bins(&self) -> usize {
        self.weights.len()
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn has_overflow(&self) -> bool {
        self.overflow
    }

    /// True when the weights are exact observation counts.
    pub fn is_count_backed(&self) -> bool {
        self.count_backed
    }

    /// Lower edge of bin `i`.
    pub fn edge(&self, i: usize) -> u64 {
        self.first_edge + i as u64 * self.bin_width
    }

    /// Exclusive upper edge of the bin range (lower edge of the overflow bin
    /// plus one width, when an overflow bin is present).
    pub fn end_edge(&self) -> u64 {
        self.edge(self.weights.len())
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.weight_total).collect()
    }

    /// `(lower_edge, probability)` pairs in edge order.
    pub fn bins(&self) -> Vec<(u64, f64)> {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| (self.edge(i), w / self.weight_total))
            .collect()
    }

    /// Probability of the `[0, Δl)` bin; 0 when the histogram starts above 0.
    pub fn zero_bin_probability(&self) -> f64 {
        if self.first_edge == 0 {
            self.weights[0] / self.weight_total
        } else {
            0.0
        }
    }

    /// Mean reconstructed from the distribution, with each bin represented
    /// by its lower edge (exact for unit bins without overflow).
    pub fn mean(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| self.edge(i) as f64 * (w / self.weight_total))
            .sum()
    }

    /// Lower edge of the first bin at which the cumulative probability
    /// reaches `q`.
    pub fn percentile_edge(&self, q: f64) -> u64 {
        let q = q.clamp(0.0, 1.0);
        let mut cumulative = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            cumulative += w / self.weight_total;
            if cumulative >= q {
                return self.edge(i);
            }
        }
        self.edge(self.weights.len().saturating_sub(1))
    }

    /// Probability mass in bins whose lower edge lies strictly above `edge`.
    pub fn mass_above_edge(&self, edge: u64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| self.edge(*i) > edge)
            .map(|(_, w)| w / self.weight_total)
            .sum()
    }

    /// Delimited export: `l_lower,l_upper,count,probability`. The overflow
    /// row leaves `l_upper` empty.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from("l_lower,l_upper,count,probability\n");
        let last = self.weights.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            let lower = self.edge(i);
            let upper = if self.overflow && i == last {
                String::new()
            } else {
                (lower + self.bin_width).to_string()
            };
            let count = if self.count_backed {
                format!("{}", *w as u64)
            } else {
                format!("{w}")
            };
            let p = w / self.weight_total;
            out.push_str(&format!("{lower},{upper},{count},{p}\n"));
        }
        out
    }

    fn padded(&self, first_edge: u64, end_edge: u64) -> CitationHistogram {
        let w = self.bin_width;
        let lead = ((self.first_edge - first_edge) / w) as usize;
        let trail = ((end_edge - self.end_edge()) / w) as usize;
        let mut weights = vec![0.0; lead];
        weights.extend_from_slice(&self.weights);
        weights.resize(weights.len() + trail, 0.0);
        CitationHistogram {
            label: self.label.clone(),
            first_edge,
            bin_width: w,
            weights,
            weight_total: self.weight_total,
            n_samples: self.n_samples,
            count_backed: self.count_backed,
            overflow: self.overflow,
        }
    }
}

/// Build the citation histogram of a sample of citation counts.
pub fn build_histogram(
    citations: &[u64],
    spec: &BinningSpec,
    label: impl Into<String>,
) -> Result<CitationHistogram, HistogramError> {
    spec.validate()?;
    if citations.is_empty() {
        return Err(HistogramError::EmptySample);
    }
    let w = spec.bin_width;
    let label = label.into();
    match spec.max_bin {
        Some(cap) if spec.include_overflow => {
            let regular = (cap / w) as usize;
            let mut weights = vec![0.0; regular + 1];
            for &c in citations {
                let idx = if c >= cap { regular } else { (c / w) as usize };
                weights[idx] += 1.0;
            }
            Ok(CitationHistogram {
                label,
                first_edge: 0,
                bin_width: w,
                weights,
                weight_total: citations.len() as f64,
                n_samples: citations.len() as u64,
                count_backed: true,
                overflow: true,
            })
        }
        Some(cap) => {
            let mut weights = vec![0.0; (cap / w) as usize];
            let mut kept: u64 = 0;
            for &c in citations {
                if c < cap {
                    weights[(c / w) as usize] += 1.0;
                    kept += 1;
                }
            }
            if kept == 0 {
                return Err(HistogramError::EmptySample);
            }
            Ok(CitationHistogram {
                label,
                first_edge: 0,
                bin_width: w,
                weights,
                weight_total: kept as f64,
                n_samples: kept,
                count_backed: true,
                overflow: false,
            })
        }
        None => {
            let max = *citations.iter().max().expect("nonempty");
            let mut weights = vec![0.0; (max / w) as usize + 1];
            for &c in citations {
                weights[(c / w) as usize] += 1.0;
            }
            Ok(CitationHistogram {
                label,
                first_edge: 0,
                bin_width: w,
                weights,
                weight_total: citations.len() as f64,
                n_samples: citations.len() as u64,
                count_backed: true,
                overflow: false,
            })
        }
    }
}

/// Re-express two histograms over the union of their bin ranges, filling
/// missing bins with probability zero. Probabilities are otherwise
/// unchanged.
pub fn align_support(
    p: &CitationHistogram,
    q: &CitationHistogram,
) -> Result<(CitationHistogram, CitationHistogram), HistogramError> {
    if p.bin_width != q.bin_width {
        return Err(HistogramError::BinWidthMismatch(p.bin_width, q.bin_width));
    }
    if p.overflow != q.overflow || (p.overflow && p.end_edge() != q.end_edge()) {
        // An overflow bin is unbounded above, so two histograms can only
        // share a grid if their overflow bins start at the same edge.
        return Err(HistogramError::OverflowMismatch);
    }
    let first = p.first_edge.min(q.first_edge);
    let end = p.end_edge().max(q.end_edge());
    Ok((p.padded(first, end), q.padded(first, end)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn point_mass_occupies_single_bin() {
        let h = build_histogram(&[5, 5, 5, 5], &BinningSpec::default(), "pm").unwrap();
        assert_eq!(h.num_bins(), 6);
        let bins = h.bins();
        assert_eq!(bins[5], (5, 1.0));
        for (_, p) in &bins[..5] {
            assert_eq!(*p, 0.0);
        }
    }

    #[test]
    fn hand_tally_matches() {
        let h = build_histogram(&[0, 0, 1, 2], &BinningSpec::default(), "t").unwrap();
        let probs = h.probabilities();
        assert_eq!(probs, vec![0.5, 0.25, 0.25]);
        assert_eq!(h.n_samples(), 4);
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(matches!(
            build_histogram(&[], &BinningSpec::default(), "e"),
            Err(HistogramError::EmptySample)
        ));
    }

    #[test]
    fn binning_spec_validation() {
        let bad_width = BinningSpec {
            bin_width: 0,
            ..Default::default()
        };
        assert!(bad_width.validate().is_err());
        let bad_cap = BinningSpec {
            bin_width: 2,
            max_bin: Some(5),
            include_overflow: true,
        };
        assert!(matches!(
            bad_cap.validate(),
            Err(HistogramError::MisalignedMaxBin { .. })
        ));
    }

    #[test]
    fn overflow_collects_the_tail() {
        let spec = BinningSpec {
            bin_width: 1,
            max_bin: Some(3),
            include_overflow: true,
        };
        let h = build_histogram(&[0, 1, 5, 9, 2], &spec, "o").unwrap();
        assert!(h.has_overflow());
        assert_eq!(h.num_bins(), 4);
        assert_close(h.probabilities()[3], 0.4, 1e-15);
        // overflow bin is represented by its lower edge in the mean
        assert_close(h.mean(), (0.0 + 1.0 + 3.0 + 3.0 + 2.0) / 5.0, 1e-12);
    }

    #[test]
    fn truncation_drops_the_tail_and_renormalizes() {
        let spec = BinningSpec {
            bin_width: 1,
            max_bin: Some(3),
            include_overflow: false,
        };
        let h = build_histogram(&[0, 1, 5, 9, 2], &spec, "t").unwrap();
        assert_eq!(h.n_samples(), 3);
        let sum: f64 = h.probabilities().iter().sum();
        assert_close(sum, 1.0, 1e-12);
    }

    #[test]
    fn align_pads_narrower_histogram() {
        let p = CitationHistogram::from_counts("p", 0, 1, &[1, 1, 1, 1]).unwrap();
        let q = CitationHistogram::from_counts("q", 0, 1, &[1, 1, 1, 1, 1, 1]).unwrap();
        let (p2, q2) = align_support(&p, &q).unwrap();
        assert_eq!(p2.num_bins(), 6);
        assert_eq!(q2.num_bins(), 6);
        assert_eq!(p2.probabilities()[4], 0.0);
        assert_eq!(p2.probabilities()[5], 0.0);
        assert_close(p2.probabilities().iter().sum::<f64>(), 1.0, 1e-12);
    }

    #[test]
    fn align_identical_grids_is_identity() {
        let p = CitationHistogram::from_counts("p", 0, 1, &[2, 1]).unwrap();
        let q = CitationHistogram::from_counts("q", 0, 1, &[1, 3]).unwrap();
        let (p2, q2) = align_support(&p, &q).unwrap();
        assert_eq!(p2, p);
        assert_eq!(q2, q);
    }

    #[test]
    fn align_takes_union_of_ranges() {
        // p over bins 2..4, q over 0..3 -> both over 0..4
        let p = CitationHistogram::from_counts("p", 2, 1, &[1, 1, 1]).unwrap();
        let q = CitationHistogram::from_counts("q", 0, 1, &[1, 1, 1, 1]).unwrap();
        let (p2, q2) = align_support(&p, &q).unwrap();
        assert_eq!(p2.first_edge(), 0);
        assert_eq!(p2.num_bins(), 5);
        assert_eq!(q2.num_bins(), 5);
        assert_eq!(p2.probabilities()[0], 0.0);
        assert_close(q2.probabilities()[4], 0.0, 0.0);
    }

    #[test]
    fn align_rejects_mismatched_widths() {
        let p = CitationHistogram::from_counts("p", 0, 1, &[1, 1]).unwrap();
        let q = CitationHistogram::from_counts("q", 0, 2, &[1, 1]).unwrap();
        assert!(matches!(
            align_support(&p, &q),
            Err(HistogramError::BinWidthMismatch(1, 2))
        ));
    }

    #[test]
    fn mean_reconstruction_matches_sample_mean() {
        let data = [0u64, 0, 1, 2, 7, 3, 3, 12, 0, 1];
        let h = build_histogram(&data, &BinningSpec::default(), "m").unwrap();
        let mean = data.iter().sum::<u64>() as f64 / data.len() as f64;
        assert_close(h.mean(), mean, 1e-9);
    }

    #[test]
    fn percentile_and_tail_mass() {
        let h = CitationHistogram::from_counts("p", 0, 1, &[98, 1, 1]).unwrap();
        assert_eq!(h.percentile_edge(0.99), 1);
        assert_close(h.mass_above_edge(1), 0.01, 1e-15);
        assert_close(h.mass_above_edge(2), 0.0, 0.0);
    }

    #[test]
    fn delimited_export_shape() {
        let h = CitationHistogram::from_counts("x", 0, 1, &[3, 1]).unwrap();
        let text = h.to_delimited();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("l_lower,l_upper,count,probability"));
        assert_eq!(lines.next(), Some("0,1,3,0.75"));
        assert_eq!(lines.next(), Some("1,2,1,0.25"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn from_probabilities_validates() {
        assert!(CitationHistogram::from_probabilities("b", 0, 1, &[0.5, -0.1], 0).is_err());
        assert!(CitationHistogram::from_probabilities("b", 0, 1, &[], 0).is_err());
        assert!(CitationHistogram::from_probabilities("b", 0, 1, &[0.0, 0.0], 0).is_err());
        let h = CitationHistogram::from_probabilities("ok", 0, 1, &[0.25, 0.75], 100).unwrap();
        assert!(!h.is_count_backed());
        assert_eq!(h.n_samples(), 100);
    }
}
