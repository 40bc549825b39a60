//! Deterministic synthetic ground-truth / prediction pairs that expose where
//! boundary and overlap metrics disagree with small-segment emphasis.
//!
//! | scenario | ground truth | prediction |
//! |---|---|---|
//! | `rings-under` | disc radius R | concentric disc radius R−k |
//! | `rings-over` | disc radius R | concentric disc radius R+k |
//! | `multisegment-e` | blobs of 150, 30, 10 px | covers 120, 10, 5 px |
//! | `multisegment-f` | blobs of 150, 30, 10 px | covers 110, 25, 0 px |
//! | `multisize-b` | one large + three small discs | over-grown large disc, one small disc |
//! | `multisize-c` | same | exact, except the smallest disc is missed |
//! | `multisize-d` | same | every disc found, slightly eroded |

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mask::{LabelMask, Pixel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioName {
    RingsUnder,
    RingsOver,
    MultisegmentE,
    MultisegmentF,
    MultisizeB,
    MultisizeC,
    MultisizeD,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 7] = [
        ScenarioName::RingsUnder,
        ScenarioName::RingsOver,
        ScenarioName::MultisegmentE,
        ScenarioName::MultisegmentF,
        ScenarioName::MultisizeB,
        ScenarioName::MultisizeC,
        ScenarioName::MultisizeD,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::RingsUnder => "rings-under",
            ScenarioName::RingsOver => "rings-over",
            ScenarioName::MultisegmentE => "multisegment-e",
            ScenarioName::MultisegmentF => "multisegment-f",
            ScenarioName::MultisizeB => "multisize-b",
            ScenarioName::MultisizeC => "multisize-c",
            ScenarioName::MultisizeD => "multisize-d",
        }
    }

    fn default_canvas(self) -> (usize, usize) {
        match self {
            ScenarioName::RingsUnder | ScenarioName::RingsOver => (100, 100),
            ScenarioName::MultisegmentE | ScenarioName::MultisegmentF => (32, 32),
            _ => (128, 128),
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario {s:?}")))
    }
}

/// Blob sizes of the multisegment ground truth.
pub const MULTISEGMENT_AREAS: [usize; 3] = [150, 30, 10];
/// Pixels of each blob recovered by `multisegment-e`.
pub const MULTISEGMENT_E_TP: [usize; 3] = [120, 10, 5];
/// Pixels of each blob recovered by `multisegment-f`.
pub const MULTISEGMENT_F_TP: [usize; 3] = [110, 25, 0];

// (top, left, rows, cols) of the three multisegment blobs.
const MULTISEGMENT_RECTS: [(usize, usize, usize, usize); 3] =
    [(2, 2, 10, 15), (2, 21, 5, 6), (16, 2, 2, 5)];
const MULTISEGMENT_MIN: (usize, usize) = (28, 19);

const MULTISIZE_LARGE_RADIUS: i64 = 24;
const MULTISIZE_LARGE_CENTER: (i64, i64) = (40, 40);
const MULTISIZE_SMALL_RADII: [i64; 3] = [2, 3, 4];
// Radius of the over-grown large disc in multisize-b; small discs stay clear of it.
const MULTISIZE_B_RADIUS: i64 = 34;
const MULTISIZE_MIN: (usize, usize) = (96, 96);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub width: usize,
    pub height: usize,
    /// Drives small-disc placement in the multisize scenarios.
    pub seed: u64,
    /// Ground-truth disc radius for the ring scenarios.
    pub ring_radius: usize,
    /// Radius difference between ground truth and prediction for the ring scenarios.
    pub ring_offset: usize,
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName) -> Self {
        let (width, height) = name.default_canvas();
        ScenarioSpec {
            name,
            width,
            height,
            seed: 0,
            ring_radius: 30,
            ring_offset: 5,
        }
    }

    pub fn with_canvas(mut self, width: usize, height: usize) -> Self {
        self.width = width;
        self.height = height;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ring_offset(mut self, offset: usize) -> Self {
        self.ring_offset = offset;
        self
    }

    pub fn with_ring_radius(mut self, radius: usize) -> Self {
        self.ring_radius = radius;
        self
    }

    /// Smallest canvas the scenario fits in.
    pub fn min_canvas(&self) -> (usize, usize) {
        match self.name {
            ScenarioName::RingsUnder | ScenarioName::RingsOver => {
                let side = 2 * (self.ring_radius + self.ring_offset) + 3;
                (side, side)
            }
            ScenarioName::MultisegmentE | ScenarioName::MultisegmentF => MULTISEGMENT_MIN,
            _ => MULTISIZE_MIN,
        }
    }
}

/// Produces the `(ground truth, prediction)` pair for a scenario. Identical
/// specs always give identical masks.
pub fn generate(spec: &ScenarioSpec) -> Result<(LabelMask, LabelMask)> {
    let (min_w, min_h) = spec.min_canvas();
    if spec.width < min_w || spec.height < min_h {
        return Err(Error::CanvasTooSmall {
            scenario: spec.name.to_string(),
            width: spec.width,
            height: spec.height,
            min_width: min_w,
            min_height: min_h,
        });
    }
    match spec.name {
        ScenarioName::RingsUnder | ScenarioName::RingsOver => rings(spec),
        ScenarioName::MultisegmentE => multisegment(spec, MULTISEGMENT_E_TP),
        ScenarioName::MultisegmentF => multisegment(spec, MULTISEGMENT_F_TP),
        ScenarioName::MultisizeB | ScenarioName::MultisizeC | ScenarioName::MultisizeD => multisize(spec),
    }
}

/// Pixels of the disc `(r - cy)^2 + (c - cx)^2 <= radius^2`, clipped to the canvas, row-major.
pub fn disc_pixels(center: (i64, i64), radius: i64, width: usize, height: usize) -> Vec<Pixel> {
    let (cy, cx) = center;
    let mut out = Vec::new();
    for r in (cy - radius).max(0)..=(cy + radius).min(height as i64 - 1) {
        for c in (cx - radius).max(0)..=(cx + radius).min(width as i64 - 1) {
            if (r - cy).pow(2) + (c - cx).pow(2) <= radius * radius {
                out.push((r as usize, c as usize));
            }
        }
    }
    out
}

fn paint(mask: &mut LabelMask, pixels: &[Pixel], label: u8) {
    for &(r, c) in pixels {
        mask.set(r, c, label);
    }
}

fn rings(spec: &ScenarioSpec) -> Result<(LabelMask, LabelMask)> {
    let center = ((spec.height / 2) as i64, (spec.width / 2) as i64);
    let radius = spec.ring_radius as i64;
    let k = spec.ring_offset as i64;
    let pred_radius = match spec.name {
        ScenarioName::RingsUnder => radius - k,
        _ => radius + k,
    };
    if radius == 0 || pred_radius < 0 {
        return Err(Error::InvalidArgument(format!(
            "ring radius {radius} with offset {k} leaves no prediction"
        )));
    }
    let mut gt = LabelMask::zeros(spec.width, spec.height)?;
    let mut pred = LabelMask::zeros(spec.width, spec.height)?;
    paint(&mut gt, &disc_pixels(center, radius, spec.width, spec.height), 1);
    paint(&mut pred, &disc_pixels(center, pred_radius, spec.width, spec.height), 1);
    Ok((gt, pred))
}

fn rect_pixels((top, left, rows, cols): (usize, usize, usize, usize)) -> Vec<Pixel> {
    (top..top + rows)
        .flat_map(|r| (left..left + cols).map(move |c| (r, c)))
        .collect()
}

fn multisegment(spec: &ScenarioSpec, covered: [usize; 3]) -> Result<(LabelMask, LabelMask)> {
    let mut gt = LabelMask::zeros(spec.width, spec.height)?;
    let mut pred = LabelMask::zeros(spec.width, spec.height)?;
    for (rect, n) in MULTISEGMENT_RECTS.into_iter().zip(covered) {
        let pixels = rect_pixels(rect);
        paint(&mut gt, &pixels, 1);
        // First n pixels in raster order: full rows then a partial row, always connected.
        paint(&mut pred, &pixels[..n], 1);
    }
    Ok((gt, pred))
}

fn place_small_discs(spec: &ScenarioSpec) -> Result<Vec<(i64, i64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (w, h) = (spec.width as i64, spec.height as i64);
    let mut placed: Vec<((i64, i64), i64)> = vec![(MULTISIZE_LARGE_CENTER, MULTISIZE_B_RADIUS)];
    let mut centers = Vec::new();
    for &radius in &MULTISIZE_SMALL_RADII {
        let mut found = None;
        for _ in 0..10_000 {
            let cy = rng.gen_range(radius + 1..h - radius - 1);
            let cx = rng.gen_range(radius + 1..w - radius - 1);
            // A gap of at least two pixels keeps discs apart under 8-connectivity.
            let clear = placed.iter().all(|&((py, px), pr)| {
                let gap = pr + radius + 3;
                (cy - py).pow(2) + (cx - px).pow(2) > gap * gap
            });
            if clear {
                found = Some((cy, cx));
                break;
            }
        }
        let center = found.ok_or_else(|| Error::CanvasTooSmall {
            scenario: spec.name.to_string(),
            width: spec.width,
            height: spec.height,
            min_width: MULTISIZE_MIN.0,
            min_height: MULTISIZE_MIN.1,
        })?;
        placed.push((center, radius));
        centers.push(center);
    }
    Ok(centers)
}

fn multisize(spec: &ScenarioSpec) -> Result<(LabelMask, LabelMask)> {
    let (w, h) = (spec.width, spec.height);
    let small = place_small_discs(spec)?;
    let large = disc_pixels(MULTISIZE_LARGE_CENTER, MULTISIZE_LARGE_RADIUS, w, h);
    let smalls: Vec<Vec<Pixel>> = small
        .iter()
        .zip(MULTISIZE_SMALL_RADII)
        .map(|(&c, r)| disc_pixels(c, r, w, h))
        .collect();

    let mut gt = LabelMask::zeros(w, h)?;
    paint(&mut gt, &large, 1);
    for s in &smalls {
        paint(&mut gt, s, 1);
    }

    let mut pred = LabelMask::zeros(w, h)?;
    match spec.name {
        ScenarioName::MultisizeB => {
            paint(&mut pred, &disc_pixels(MULTISIZE_LARGE_CENTER, MULTISIZE_B_RADIUS, w, h), 1);
            paint(&mut pred, &smalls[2], 1);
        }
        ScenarioName::MultisizeC => {
            paint(&mut pred, &large, 1);
            for s in &smalls[1..] {
                paint(&mut pred, s, 1);
            }
        }
        ScenarioName::MultisizeD => {
            let eroded = disc_pixels(MULTISIZE_LARGE_CENTER, MULTISIZE_LARGE_RADIUS - 1, w, h);
            paint(&mut pred, &eroded, 1);
            // Each small disc loses its top pixel.
            for s in &smalls {
                paint(&mut pred, &s[1..], 1);
            }
        }
        _ => unreachable!("not a multisize scenario"),
    }
    Ok((gt, pred))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::{confusion_counts, connected_components, Connectivity};

    #[test]
    fn names_round_trip() {
        for n in ScenarioName::ALL {
            assert_eq!(n.as_str().parse::<ScenarioName>().unwrap(), n);
        }
        assert!("rings".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn multisegment_counts_match_caption() {
        for (name, tp) in [
            (ScenarioName::MultisegmentE, MULTISEGMENT_E_TP),
            (ScenarioName::MultisegmentF, MULTISEGMENT_F_TP),
        ] {
            let (gt, pred) = generate(&ScenarioSpec::new(name)).unwrap();
            let c = confusion_counts(&gt, &pred, 1).unwrap();
            assert_eq!((c.tp, c.fp, c.fn_), (135, 0, 55));
            let segs = connected_components(&gt, 1, Connectivity::Eight);
            let areas: Vec<_> = segs.iter().map(|s| s.area()).collect();
            assert_eq!(areas, MULTISEGMENT_AREAS.to_vec());
            for (seg, want) in segs.iter().zip(tp) {
                let got = seg.pixels.iter().filter(|&&(r, c)| pred.get(r, c) == 1).count();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn rings_are_nested() {
        let (gt, under) = generate(&ScenarioSpec::new(ScenarioName::RingsUnder)).unwrap();
        let (_, over) = generate(&ScenarioSpec::new(ScenarioName::RingsOver)).unwrap();
        let u = confusion_counts(&gt, &under, 1).unwrap();
        let o = confusion_counts(&gt, &over, 1).unwrap();
        assert_eq!(u.fp, 0);
        assert_eq!(o.fn_, 0);
    }

    #[test]
    fn multisize_has_four_segments() {
        for name in [ScenarioName::MultisizeB, ScenarioName::MultisizeC, ScenarioName::MultisizeD] {
            let (gt, _) = generate(&ScenarioSpec::new(name)).unwrap();
            assert_eq!(connected_components(&gt, 1, Connectivity::Eight).len(), 4);
        }
        let (_, c) = generate(&ScenarioSpec::new(ScenarioName::MultisizeC)).unwrap();
        assert_eq!(connected_components(&c, 1, Connectivity::Eight).len(), 3);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let spec = ScenarioSpec::new(ScenarioName::MultisizeD).with_seed(7);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = generate(&spec.clone().with_seed(8)).unwrap();
        assert_ne!(generate(&spec).unwrap().0, other.0);
    }

    #[test]
    fn small_canvas_rejected() {
        for name in ScenarioName::ALL {
            let spec = ScenarioSpec::new(name).with_canvas(10, 10);
            assert!(matches!(generate(&spec), Err(Error::CanvasTooSmall { .. })), "{name}");
        }
        let min = ScenarioSpec::new(ScenarioName::MultisegmentE).min_canvas();
        let spec = ScenarioSpec::new(ScenarioName::MultisegmentE).with_canvas(min.0, min.1);
        assert!(generate(&spec).is_ok());
    }

    #[test]
    fn disc_areas() {
        assert_eq!(disc_pixels((10, 10), 2, 30, 30).len(), 13);
        assert_eq!(disc_pixels((10, 10), 3, 30, 30).len(), 29);
        assert_eq!(disc_pixels((10, 10), 4, 30, 30).len(), 49);
    }
}
