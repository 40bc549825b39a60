//! Label masks and the pixel-level operations every metric is built on:
//! connected-component extraction, per-label confusion counting, FP images
//! and boundary extraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label identifier. 0 is background.
pub type Label = u8;

/// Pixel coordinate as `(row, col)`.
pub type Pixel = (usize, usize);

/// Pixel adjacency used when grouping pixels into segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn from_neighbors(n: u8) -> Result<Self> {
        match n {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::InvalidArgument(format!(
                "connectivity must be 4 or 8, got {other}"
            ))),
        }
    }

    pub fn neighbors(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

/// Row-major 2D grid of label IDs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelMask {
    width: usize,
    height: usize,
    labels: Vec<Label>,
}

impl LabelMask {
    pub fn new(width: usize, height: usize, labels: Vec<Label>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMask(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if labels.len() != width * height {
            return Err(Error::InvalidMask(format!(
                "expected {} labels for {width}x{height}, got {}",
                width * height,
                labels.len()
            )));
        }
        Ok(LabelMask {
            width,
            height,
            labels,
        })
    }

    /// All-background mask.
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0; width * height])
    }

    /// Builds a mask from nested rows, mostly handy in tests.
    pub fn from_rows<R: AsRef<[Label]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != width) {
            return Err(Error::InvalidMask("ragged rows".into()));
        }
        let labels = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(width, height, labels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.labels
    }

    pub fn into_vec(self) -> Vec<Label> {
        self.labels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Label {
        self.labels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, label: Label) {
        self.labels[row * self.width + col] = label;
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn contains_label(&self, label: Label) -> bool {
        self.labels.contains(&label)
    }

    /// Sorted distinct non-zero labels.
    pub fn labels_present(&self) -> Vec<Label> {
        let mut seen = [false; 256];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        (1..=255u8).filter(|&l| seen[l as usize]).collect()
    }

    pub fn ensure_same_dims(&self, other: &LabelMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::dims(self.dims(), other.dims()));
        }
        Ok(())
    }

    /// Binary mask of pixels carrying `label`, as 0/1.
    pub fn binary(&self, label: Label) -> LabelMask {
        LabelMask {
            width: self.width,
            height: self.height,
            labels: self.labels.iter().map(|&l| u8::from(l == label)).collect(),
        }
    }
}

/// One connected component of one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub label: Label,
    /// Pixels in row-major order.
    pub pixels: Vec<Pixel>,
    /// `(min_row, min_col, max_row, max_col)`, inclusive.
    pub bbox: (usize, usize, usize, usize),
}

impl Segment {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        DisjointSet { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

const UNLABELLED: u32 = u32::MAX;

/// Extracts the maximal connected components of `label`, using two-pass
/// union-find labelling.
///
/// Segments partition the label's pixels and are ordered by the top-left
/// corner of their bounding box (ties broken by first pixel in raster order).
/// An absent label yields an empty list.
pub fn connected_components(
    mask: &LabelMask,
    label: Label,
    connectivity: Connectivity,
) -> Vec<Segment> {
    let (w, h) = mask.dims();
    let mut provisional = vec![UNLABELLED; w * h];
    let mut sets = DisjointSet::new();

    for row in 0..h {
        for col in 0..w {
            if mask.get(row, col) != label {
                continue;
            }
            let mut current = UNLABELLED;
            let visit = |r: usize, c: usize, current: &mut u32, sets: &mut DisjointSet| {
                let p = provisional[r * w + c];
                if p == UNLABELLED {
                    return;
                }
                if *current == UNLABELLED {
                    *current = p;
                } else {
                    sets.union(*current, p);
                }
            };
            if col > 0 {
                visit(row, col - 1, &mut current, &mut sets);
            }
            if row > 0 {
                visit(row - 1, col, &mut current, &mut sets);
                if connectivity == Connectivity::Eight {
                    if col > 0 {
                        visit(row - 1, col - 1, &mut current, &mut sets);
                    }
                    if col + 1 < w {
                        visit(row - 1, col + 1, &mut current, &mut sets);
                    }
                }
            }
            if current == UNLABELLED {
                current = sets.make();
            }
            provisional[row * w + col] = current;
        }
    }

    // Second pass: resolve roots and collect pixels per component.
    let mut root_to_segment: Vec<u32> = vec![UNLABELLED; sets.parent.len()];
    let mut segments: Vec<Segment> = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let p = provisional[row * w + col];
            if p == UNLABELLED {
                continue;
            }
            let root = sets.find(p) as usize;
            if root_to_segment[root] == UNLABELLED {
                root_to_segment[root] = segments.len() as u32;
                segments.push(Segment {
                    label,
                    pixels: Vec::new(),
                    bbox: (row, col, row, col),
                });
            }
            let seg = &mut segments[root_to_segment[root] as usize];
            seg.pixels.push((row, col));
            let bb = &mut seg.bbox;
            bb.0 = bb.0.min(row);
            bb.1 = bb.1.min(col);
            bb.2 = bb.2.max(row);
            bb.3 = bb.3.max(col);
        }
    }

    segments.sort_by_key(|s| (s.bbox.0, s.bbox.1, s.pixels[0]));
    segments
}

/// Pixel-level confusion counts for one label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Ground-truth positives, `|G|`.
    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    /// Predicted positives, `|S|`.
    pub fn predicted(&self) -> u64 {
        self.tp + self.fp
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts::new(self.tp + o.tp, self.fp + o.fp, self.fn_ + o.fn_, self.tn + o.tn)
    }
}

pub fn confusion_counts(gt: &LabelMask, pred: &LabelMask, label: Label) -> Result<ConfusionCounts> {
    gt.ensure_same_dims(pred)?;
    let mut c = ConfusionCounts::default();
    for (&g, &p) in gt.as_slice().iter().zip(pred.as_slice()) {
        match (g == label, p == label) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Binary image of the false positives of `label`: pixels predicted as
/// `label` whose ground truth is something else.
pub fn fp_mask(gt: &LabelMask, pred: &LabelMask, label: Label) -> Result<LabelMask> {
    gt.ensure_same_dims(pred)?;
    let labels = gt
        .as_slice()
        .iter()
        .zip(pred.as_slice())
        .map(|(&g, &p)| u8::from(p == label && g != label))
        .collect();
    LabelMask::new(gt.width(), gt.height(), labels)
}

/// Boundary pixels of one label's region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySet {
    pub label: Label,
    /// Row-major order.
    pub points: Vec<Pixel>,
}

impl BoundarySet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

/// Region pixels of `label` with at least one 4-neighbour outside the region.
/// The image border counts as outside.
pub fn boundary(mask: &LabelMask, label: Label) -> BoundarySet {
    let (w, h) = mask.dims();
    let inside = |r: usize, c: usize| mask.get(r, c) == label;
    let mut points = Vec::new();
    for row in 0..h {
        for col in 0..w {
            if !inside(row, col) {
                continue;
            }
            let on_edge = row == 0
                || col == 0
                || row + 1 == h
                || col + 1 == w
                || !inside(row - 1, col)
                || !inside(row + 1, col)
                || !inside(row, col - 1)
                || !inside(row, col + 1);
            if on_edge {
                points.push((row, col));
            }
        }
    }
    BoundarySet { label, points }
}
