//! Radial publisher maps: discipline at the center, its top publishers
//! placed clockwise from 12 o'clock in descending citation-average order,
//! radial distance growing with information gain, dot area proportional to
//! output, color by gain band.
//!
//! Angles are degrees clockwise from vertical. Spacing is uniform among the
//! k shown publishers (a convention, as is the linear radius mapping and
//! the quartile color bands; all are config-driven). Outlier flags are
//! advisory: a publisher disappears from the map only when the config names
//! it explicitly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::histogram::CitationHistogram;
use crate::indicators::PublisherStats;
use crate::infogain::InfoGainResult;
use crate::record::CitationRecord;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("no publishers available for the map")]
    EmptyStats,
    #[error("no gain result for selected publisher '{0}'")]
    MissingGain(String),
    #[error("invalid map config: {0}")]
    BadConfig(String),
    #[error("layout has no dots to render")]
    EmptyLayout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusScale {
    #[default]
    Linear,
    /// Compresses gain ranges spanning orders of magnitude.
    Log,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HelioConfig {
    /// How many of the most productive publishers to show.
    pub k: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Dot area of the most productive publisher shown.
    pub area_max: f64,
    pub radius_scale: RadiusScale,
    /// Publishers removed from the map entirely.
    pub exclude: BTreeSet<String>,
    /// Publishers kept but marked as flagged outliers.
    pub flagged: BTreeSet<String>,
}

impl Default for HelioConfig {
    fn default() -> Self {
        HelioConfig {
            k: 20,
            r_min: 60.0,
            r_max: 240.0,
            area_max: 2400.0,
            radius_scale: RadiusScale::Linear,
            exclude: BTreeSet::new(),
            flagged: BTreeSet::new(),
        }
    }
}

/// One positioned publisher.
#[derive(Debug, Clone, Serialize)]
pub struct HelioDot {
    pub label: String,
    /// Degrees clockwise from 12 o'clock, in [0, 360).
    pub angle: f64,
    pub radius: f64,
    pub area: f64,
    /// Gain-band index, 0 (most alike) to 3.
    pub color_band: usize,
    pub gain: f64,
    pub citation_average: f64,
    pub nr_bc: u64,
    /// Advisory outlier flag carried into the layout.
    pub excluded_outlier: bool,
}

/// A complete positioned map, exportable before rendering.
#[derive(Debug, Clone, Serialize)]
pub struct HelioLayout {
    pub center: String,
    pub dots: Vec<HelioDot>,
    /// Gain thresholds separating the four color bands.
    pub legend: Vec<f64>,
    pub config: HelioConfig,
}

fn radius_ratio(gain: f64, g_max: f64, scale: RadiusScale) -> f64 {
    if g_max <= 0.0 {
        return 0.0;
    }
    match scale {
        RadiusScale::Linear => gain / g_max,
        RadiusScale::Log => (1.0 + 999.0 * gain / g_max).ln() / 1000f64.ln(),
    }
}

/// Position the top-k publishers of a discipline.
pub fn layout_map(
    discipline_hist: &CitationHistogram,
    stats: &[PublisherStats],
    gains: &[InfoGainResult],
    config: &HelioConfig,
) -> Result<HelioLayout, MapError> {
    if config.k == 0 {
        return Err(MapError::BadConfig("k must be at least 1".into()));
    }
    if !config.r_min.is_finite()
        || !config.r_max.is_finite()
        || config.r_min < 0.0
        || config.r_min > config.r_max
    {
        return Err(MapError::BadConfig("need 0 <= r_min <= r_max".into()));
    }
    if !config.area_max.is_finite() || config.area_max <= 0.0 {
        return Err(MapError::BadConfig("area_max must be positive".into()));
    }

    let mut candidates: Vec<&PublisherStats> = stats
        .iter()
        .filter(|s| !config.exclude.contains(&s.publisher))
        .collect();
    if candidates.is_empty() {
        return Err(MapError::EmptyStats);
    }
    candidates.sort_by(|a, b| {
        b.nr_bc
            .cmp(&a.nr_bc)
            .then_with(|| a.publisher.cmp(&b.publisher))
    });
    candidates.truncate(config.k);

    let gain_by_label: BTreeMap<&str, f64> =
        gains.iter().map(|g| (g.input.as_str(), g.gain)).collect();
    let mut selected = Vec::with_capacity(candidates.len());
    for s in candidates {
        match gain_by_label.get(s.publisher.as_str()) {
            Some(&gain) => selected.push((s, gain)),
            None => return Err(MapError::MissingGain(s.publisher.clone())),
        }
    }

    // clockwise order: highest citation average at 12 o'clock
    selected.sort_by(|a, b| {
        b.0.citation_average
            .total_cmp(&a.0.citation_average)
            .then_with(|| a.0.publisher.cmp(&b.0.publisher))
    });

    let m = selected.len();
    let g_max = selected
        .iter()
        .map(|(_, g)| *g)
        .fold(f64::NEG_INFINITY, f64::max);
    let nr_max = selected.iter().map(|(s, _)| s.nr_bc).max().unwrap_or(1);

    let mut sorted_gains: Vec<f64> = selected.iter().map(|(_, g)| *g).collect();
    sorted_gains.sort_by(f64::total_cmp);
    let quartile = |q: f64| -> f64 {
        let idx = ((q * m as f64).ceil() as usize).clamp(1, m) - 1;
        sorted_gains[idx]
    };
    let legend = vec![quartile(0.25), quartile(0.5), quartile(0.75)];

    let dots = selected
        .iter()
        .enumerate()
        .map(|(j, (s, gain))| {
            let ratio = radius_ratio(*gain, g_max, config.radius_scale);
            HelioDot {
                label: s.publisher.clone(),
                angle: 360.0 * j as f64 / m as f64,
                radius: config.r_min + (config.r_max - config.r_min) * ratio,
                area: config.area_max * s.nr_bc as f64 / nr_max as f64,
                color_band: legend.iter().filter(|t| *gain > **t).count(),
                gain: *gain,
                citation_average: s.citation_average,
                nr_bc: s.nr_bc,
                excluded_outlier: config.flagged.contains(&s.publisher),
            }
        })
        .collect();

    Ok(HelioLayout {
        center: discipline_hist.label().to_string(),
        dots,
        legend,
        config: config.clone(),
    })
}

/// Why a publisher was flagged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum OutlierReason {
    /// Most of its records carry an ISSN and no ISBN.
    SerialIdentifiers { issn_share: f64 },
    /// Gain far above the in-discipline median while its histogram puts
    /// real mass beyond the discipline's upper-percentile citation bin.
    HeavyTail {
        gain: f64,
        median_gain: f64,
        tail_mass: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct OutlierFlag {
    pub label: String,
    pub reasons: Vec<OutlierReason>,
}

#[derive(Debug, Clone)]
pub struct OutlierConfig {
    /// Flag when gain exceeds the median gain by this factor.
    pub gain_factor: f64,
    /// Minimum probability mass beyond the percentile bin.
    pub tail_probability: f64,
    /// Discipline percentile defining the far-tail edge.
    pub percentile: f64,
}

impl Default for OutlierConfig {
    fn default() -> Self {
        OutlierConfig {
            gain_factor: 5.0,
            tail_probability: 0.01,
            percentile: 0.99,
        }
    }
}

/// Flag publishers that behave like serials or sit far off the discipline
/// distribution. Flags are advisory; nothing is excluded here.
pub fn flag_outliers(
    discipline_hist: &CitationHistogram,
    stats: &[PublisherStats],
    gains: &[InfoGainResult],
    records: &[CitationRecord],
    config: &OutlierConfig,
) -> Vec<OutlierFlag> {
    let gain_by_label: BTreeMap<&str, f64> =
        gains.iter().map(|g| (g.input.as_str(), g.gain)).collect();
    let mut sorted_gains: Vec<f64> = gains.iter().map(|g| g.gain).collect();
    sorted_gains.sort_by(f64::total_cmp);
    let median_gain = if sorted_gains.is_empty() {
        0.0
    } else {
        let mid = sorted_gains.len() / 2;
        if sorted_gains.len().is_multiple_of(2) {
            0.5 * (sorted_gains[mid - 1] + sorted_gains[mid])
        } else {
            sorted_gains[mid]
        }
    };
    let tail_edge = discipline_hist.percentile_edge(config.percentile);

    let mut flags = Vec::new();
    for s in stats {
        let mut reasons = Vec::new();

        let mut serial = 0u64;
        let mut total = 0u64;
        for r in records.iter().filter(|r| r.publisher == s.publisher) {
            total += 1;
            if r.has_issn && !r.has_isbn {
                serial += 1;
            }
        }
        if total > 0 {
            let issn_share = serial as f64 / total as f64;
            if issn_share > 0.5 {
                reasons.push(OutlierReason::SerialIdentifiers { issn_share });
            }
        }

        if let Some(&gain) = gain_by_label.get(s.publisher.as_str()) {
            let tail_mass = s.histogram.mass_above_edge(tail_edge);
            if gain > config.gain_factor * median_gain
                && gain > 0.0
                && tail_mass >= config.tail_probability
            {
                reasons.push(OutlierReason::HeavyTail {
                    gain,
                    median_gain,
                    tail_mass,
                });
            }
        }

        if !reasons.is_empty() {
            flags.push(OutlierFlag {
                label: s.publisher.clone(),
                reasons,
            });
        }
    }
    flags
}

/// Visual options for [`render_svg`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SvgStyle {
    pub width: u32,
    pub height: u32,
    /// Band fill colors, most alike first.
    pub palette: [String; 4],
    pub background: String,
    pub font_family: String,
    pub font_size: u32,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width: 800,
            height: 800,
            palette: [
                "#2c7fb8".to_string(),
                "#7fcdbb".to_string(),
                "#fec44f".to_string(),
                "#de2d26".to_string(),
            ],
            background: "#ffffff".to_string(),
            font_family: "Helvetica, Arial, sans-serif".to_string(),
            font_size: 11,
        }
    }
}

/// Screen position of a point at `angle_deg` clockwise from 12 o'clock.
pub fn polar_to_screen(angle_deg: f64, radius: f64, cx: f64, cy: f64) -> (f64, f64) {
    let theta = angle_deg.to_radians();
    (cx + radius * theta.sin(), cy - radius * theta.cos())
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

/// Render a layout to a standalone SVG document. Identical inputs yield
/// byte-identical output.
pub fn render_svg(layout: &HelioLayout, style: &SvgStyle) -> Result<String, MapError> {
    if layout.dots.is_empty() {
        return Err(MapError::EmptyLayout);
    }
    let cx = style.width as f64 / 2.0;
    let cy = style.height as f64 / 2.0;
    let mut out = String::new();
    out.push_str(&format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = style.width,
        h = style.height,
    ));
    out.push_str(&format!(
        "  <rect width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
        style.width, style.height, style.background
    ));

    // guide rings at the radius extremes
    for r in [layout.config.r_min, layout.config.r_max] {
        out.push_str(&format!(
            "  <circle class=\"guide\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{r:.3}\" fill=\"none\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
    }

    out.push_str(&format!(
        "  <circle class=\"center\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"14\" fill=\"#444444\"/>\n"
    ));
    out.push_str(&format!(
        "  <text class=\"center-label\" x=\"{cx:.3}\" y=\"{y:.3}\" text-anchor=\"middle\" font-family=\"{ff}\" font-size=\"{fs}\" font-weight=\"bold\">{label}</text>\n",
        y = cy + 28.0,
        ff = style.font_family,
        fs = style.font_size + 2,
        label = escape_xml(&layout.center),
    ));

    for dot in &layout.dots {
        let (x, y) = polar_to_screen(dot.angle, dot.radius, cx, cy);
        let r = (dot.area / std::f64::consts::PI).sqrt();
        let stroke = if dot.excluded_outlier {
            " stroke=\"#000000\" stroke-width=\"2\" stroke-dasharray=\"4 2\""
        } else {
            ""
        };
        out.push_str(&format!(
            "  <circle class=\"dot\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r:.3}\" fill=\"{fill}\" fill-opacity=\"0.85\"{stroke}/>\n",
            fill = style.palette[dot.color_band.min(3)],
        ));
        out.push_str(&format!(
            "  <text class=\"dot-label\" x=\"{x:.3}\" y=\"{ly:.3}\" text-anchor=\"middle\" font-family=\"{ff}\" font-size=\"{fs}\">{label}</text>\n",
            ly = y - r - 4.0,
            ff = style.font_family,
            fs = style.font_size,
            label = escape_xml(&dot.label),
        ));
    }

    // legend: gain bands and the size scale
    let legend_x = 16.0;
    let mut legend_y = 24.0;
    out.push_str(&format!(
        "  <text class=\"legend-title\" x=\"{legend_x:.3}\" y=\"{legend_y:.3}\" font-family=\"{ff}\" font-size=\"{fs}\" font-weight=\"bold\">gain bands</text>\n",
        ff = style.font_family,
        fs = style.font_size,
    ));
    let bounds = [
        format!("&#8804; {:.4}", layout.legend[0]),
        format!("&#8804; {:.4}", layout.legend[1]),
        format!("&#8804; {:.4}", layout.legend[2]),
        format!("&gt; {:.4}", layout.legend[2]),
    ];
    for (band, bound) in bounds.iter().enumerate() {
        legend_y += 18.0;
        out.push_str(&format!(
            "  <rect class=\"legend-swatch\" x=\"{legend_x:.3}\" y=\"{y:.3}\" width=\"12\" height=\"12\" fill=\"{fill}\"/>\n",
            y = legend_y - 10.0,
            fill = style.palette[band],
        ));
        out.push_str(&format!(
            "  <text class=\"legend-entry\" x=\"{x:.3}\" y=\"{legend_y:.3}\" font-family=\"{ff}\" font-size=\"{fs}\">band {band}: {bound}</text>\n",
            x = legend_x + 18.0,
            ff = style.font_family,
            fs = style.font_size,
        ));
    }
    let max_nr = layout.dots.iter().map(|d| d.nr_bc).max().unwrap_or(0);
    legend_y += 18.0;
    out.push_str(&format!(
        "  <text class=\"legend-size\" x=\"{legend_x:.3}\" y=\"{legend_y:.3}\" font-family=\"{ff}\" font-size=\"{fs}\">dot area &#8733; chapters (largest = {max_nr})</text>\n",
        ff = style.font_family,
        fs = style.font_size,
    ));

    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::CitationHistogram;
    use crate::indicators::PublisherStats;

    fn hist(label: &str) -> CitationHistogram {
        CitationHistogram::from_counts(label, 0, 1, &[3, 2, 1]).unwrap()
    }

    fn stats(label: &str, nr_bc: u64, avg: f64) -> PublisherStats {
        PublisherStats {
            publisher: label.to_string(),
            nr_bc,
            total_citations: (avg * nr_bc as f64) as u64,
            citation_average: avg,
            histogram: hist(label),
        }
    }

    fn gain(label: &str, g: f64) -> InfoGainResult {
        InfoGainResult {
            reference: "D".to_string(),
            input: label.to_string(),
            gain: g,
            unexpectedness_estimated: g,
            unexpectedness_true: 0.0,
            scale: 1.0,
            smoothing_applied: false,
        }
    }

    #[test]
    fn three_dot_geometry() {
        let stats = vec![stats("A", 10, 3.0), stats("B", 8, 2.0), stats("C", 5, 1.0)];
        let gains = vec![gain("A", 0.1), gain("B", 0.2), gain("C", 0.4)];
        let layout = layout_map(&hist("D"), &stats, &gains, &HelioConfig::default()).unwrap();
        let angles: Vec<f64> = layout.dots.iter().map(|d| d.angle).collect();
        assert_eq!(angles, vec![0.0, 120.0, 240.0]);
        let radii: Vec<f64> = layout.dots.iter().map(|d| d.radius).collect();
        assert!(radii[0] < radii[1] && radii[1] < radii[2]);
        // hand-evaluated linear maps with r in [60, 240], g_max = 0.4
        assert!((radii[0] - (60.0 + 180.0 * 0.25)).abs() < 1e-9);
        assert!((radii[2] - 240.0).abs() < 1e-9);
    }

    #[test]
    fn single_publisher_sits_at_top_at_r_max() {
        let stats = vec![stats("Solo", 4, 1.5)];
        let gains = vec![gain("Solo", 0.3)];
        let layout = layout_map(&hist("D"), &stats, &gains, &HelioConfig::default()).unwrap();
        assert_eq!(layout.dots.len(), 1);
        assert_eq!(layout.dots[0].angle, 0.0);
        // it is its own in-map maximum
        assert!((layout.dots[0].radius - 240.0).abs() < 1e-12);
    }

    #[test]
    fn all_zero_gains_sit_at_r_min() {
        let stats = vec![stats("A", 4, 2.0), stats("B", 3, 1.0)];
        let gains = vec![gain("A", 0.0), gain("B", 0.0)];
        let layout = layout_map(&hist("D"), &stats, &gains, &HelioConfig::default()).unwrap();
        for dot in &layout.dots {
            assert_eq!(dot.radius, 60.0);
        }
    }

    #[test]
    fn area_ratios_track_output() {
        let stats = vec![stats("A", 10, 3.0), stats("B", 4, 2.0)];
        let gains = vec![gain("A", 0.1), gain("B", 0.2)];
        let layout = layout_map(&hist("D"), &stats, &gains, &HelioConfig::default()).unwrap();
        let a = &layout.dots[0];
        let b = &layout.dots[1];
        assert!((a.area / b.area - a.nr_bc as f64 / b.nr_bc as f64).abs() < 1e-9);
    }

    #[test]
    fn missing_gain_is_an_error() {
        let stats = vec![stats("A", 10, 3.0)];
        let err = layout_map(&hist("D"), &stats, &[], &HelioConfig::default()).unwrap_err();
        assert!(matches!(err, MapError::MissingGain(ref label) if label == "A"));
    }

    #[test]
    fn exclusion_removes_and_keeps_order() {
        let stats = vec![stats("A", 10, 3.0), stats("B", 8, 2.0), stats("C", 5, 1.0)];
        let gains = vec![gain("A", 0.1), gain("B", 0.2), gain("C", 0.4)];
        let full = layout_map(&hist("D"), &stats, &gains, &HelioConfig::default()).unwrap();
        let mut config = HelioConfig::default();
        config.exclude.insert("B".to_string());
        let reduced = layout_map(&hist("D"), &stats, &gains, &config).unwrap();
        assert_eq!(reduced.dots.len(), 2);
        let full_order: Vec<&str> = full
            .dots
            .iter()
            .map(|d| d.label.as_str())
            .filter(|l| *l != "B")
            .collect();
        let reduced_order: Vec<&str> = reduced.dots.iter().map(|d| d.label.as_str()).collect();
        assert_eq!(full_order, reduced_order);
    }

    #[test]
    fn flagged_dots_carry_the_marker() {
        let stats = vec![stats("A", 10, 3.0), stats("B", 8, 2.0)];
        let gains = vec![gain("A", 0.1), gain("B", 0.2)];
        let mut config = HelioConfig::default();
        config.flagged.insert("B".to_string());
        let layout = layout_map(&hist("D"), &stats, &gains, &config).unwrap();
        let b = layout.dots.iter().find(|d| d.label == "B").unwrap();
        assert!(b.excluded_outlier);
        let a = layout.dots.iter().find(|d| d.label == "A").unwrap();
        assert!(!a.excluded_outlier);
    }

    #[test]
    fn polar_convention_maps_90_degrees_to_three_oclock() {
        let (x, y) = polar_to_screen(90.0, 100.0, 400.0, 400.0);
        assert!((x - 500.0).abs() < 1e-9);
        assert!((y - 400.0).abs() < 1e-9);
        let (x, y) = polar_to_screen(0.0, 100.0, 400.0, 400.0);
        assert!((x - 400.0).abs() < 1e-9);
        assert!((y - 300.0).abs() < 1e-9);
    }

    #[test]
    fn svg_structure_and_determinism() {
        let stats = vec![stats("A", 10, 3.0), stats("B", 8, 2.0), stats("C", 5, 1.0)];
        let gains = vec![gain("A", 0.1), gain("B", 0.2), gain("C", 0.4)];
        let layout = layout_map(&hist("D"), &stats, &gains, &HelioConfig::default()).unwrap();
        let svg = render_svg(&layout, &SvgStyle::default()).unwrap();
        assert_eq!(svg.matches("class=\"dot\"").count(), 3);
        assert_eq!(svg.matches("class=\"center\"").count(), 1);
        let again = render_svg(&layout, &SvgStyle::default()).unwrap();
        assert_eq!(svg, again);
    }

    #[test]
    fn serial_identifier_rule_fires() {
        use std::collections::BTreeSet as Set;
        let records: Vec<CitationRecord> = (0..4)
            .map(|i| CitationRecord {
                record_id: format!("r{i}"),
                publisher_raw: "Serials Inc".into(),
                publisher: "Serials Inc".into(),
                year: 2008,
                citations: 1,
                categories: vec!["SCI".into()],
                disciplines: Set::from([crate::record::Discipline::Science]),
                has_isbn: false,
                has_issn: true,
            })
            .collect();
        let stats = vec![stats("Serials Inc", 4, 1.0)];
        let flags = flag_outliers(
            &hist("D"),
            &stats,
            &[gain("Serials Inc", 0.0)],
            &records,
            &OutlierConfig::default(),
        );
        assert_eq!(flags.len(), 1);
        assert!(matches!(
            flags[0].reasons[0],
            OutlierReason::SerialIdentifiers { issn_share } if issn_share == 1.0
        ));
    }

    #[test]
    fn matching_publisher_is_never_flagged() {
        // gain 0 and ISBN-carrying records: neither rule can fire
        use std::collections::BTreeSet as Set;
        let records: Vec<CitationRecord> = (0..4)
            .map(|i| CitationRecord {
                record_id: format!("r{i}"),
                publisher_raw: "Faithful".into(),
                publisher: "Faithful".into(),
                year: 2008,
                citations: (i % 3) as u64,
                categories: vec!["SCI".into()],
                disciplines: Set::from([crate::record::Discipline::Science]),
                has_isbn: true,
                has_issn: false,
            })
            .collect();
        let stats = vec![stats("Faithful", 4, 1.0)];
        let flags = flag_outliers(
            &hist("D"),
            &stats,
            &[gain("Faithful", 0.0)],
            &records,
            &OutlierConfig::default(),
        );
        assert!(flags.is_empty());
    }

    #[test]
    fn heavy_tail_rule_needs_both_conditions() {
        // discipline mass is concentrated low; publisher has 20% mass far out
        let discipline = CitationHistogram::from_counts("D", 0, 1, &[90, 9, 1]).unwrap();
        let spiky =
            CitationHistogram::from_counts("Spiky", 0, 1, &[4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1])
                .unwrap();
        let spiky_stats = PublisherStats {
            publisher: "Spiky".to_string(),
            nr_bc: 5,
            total_citations: 10,
            citation_average: 2.0,
            histogram: spiky,
        };
        let gains = vec![
            gain("Spiky", 0.9),
            gain("Calm1", 0.01),
            gain("Calm2", 0.02),
            gain("Calm3", 0.03),
            gain("Calm4", 0.04),
        ];
        let flags = flag_outliers(
            &discipline,
            std::slice::from_ref(&spiky_stats),
            &gains,
            &[],
            &OutlierConfig::default(),
        );
        assert_eq!(flags.len(), 1);
        assert!(matches!(
            flags[0].reasons[0],
            OutlierReason::HeavyTail { .. }
        ));

        // same distribution but unremarkable gain: no flag
        let gains = vec![
            gain("Spiky", 0.02),
            gain("Calm1", 0.01),
            gain("Calm2", 0.02),
            gain("Calm3", 0.03),
            gain("Calm4", 0.04),
        ];
        let flags = flag_outliers(
            &discipline,
            &[spiky_stats],
            &gains,
            &[],
            &OutlierConfig::default(),
        );
        assert!(flags.is_empty());
    }

    #[test]
    fn render_rejects_empty_layout() {
        let layout = HelioLayout {
            center: "D".to_string(),
            dots: vec![],
            legend: vec![0.0, 0.0, 0.0],
            config: HelioConfig::default(),
        };
        assert!(matches!(
            render_svg(&layout, &SvgStyle::default()),
            Err(MapError::EmptyLayout)
        ));
    }
}
