//! Sublevel-set cubical persistence of 2-D grayscale frames.
//!
//! Pixels are treated as top-dimensional cells (unit squares). Thresholding
//! the frame at increasing values yields a nested family of binary images;
//! `PD0` records when connected components of the dark region appear and
//! merge, `PD1` when holes (bright pockets enclosed by dark pixels) form
//! and fill in.
//!
//! Connectivity pairs dark 4-adjacency with bright 8-adjacency, the standard
//! digital-topology combination under which component and hole counts obey
//! the Euler identity exactly. `PD0` is computed by an elder-rule union-find
//! sweep over pixels in increasing order; on a merge the component with the
//! older birth survives and the younger one dies at the merging pixel's
//! value. `PD1` comes from the same sweep applied to the negated frame with
//! 8-adjacency and a virtual outside region (everything beyond the frame
//! counts as bright), mapping each finite dual pair `(b, d)` to `(-d, -b)`.
//! Essential classes - the deepest component and the unbounded bright
//! region - are excluded, so every stored point has a finite lifetime.
//!
//! Ties between equal pixel values are broken by row-major index, which
//! makes non-injective frames well-defined.

use crate::error::Error;
use crate::Result;

/// A `rows x cols` grayscale frame, row-major.
#[derive(Debug, Clone)]
pub struct ImageFrame {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl ImageFrame {
    /// Wrap pixel data; all values must be finite.
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || pixels.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "frame shape {rows} x {cols} does not match {} pixels",
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("frame has non-finite pixels".into()));
        }
        Ok(Self { rows, cols, pixels })
    }

    /// Number of pixel rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of pixel columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major pixel slice.
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Pixel at `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.cols + c]
    }

    /// Mutable pixel access (used by generators).
    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.pixels[r * self.cols + c]
    }
}

/// A multiset of `(birth, death)` pairs for one homology dimension; every
/// stored pair satisfies `death > birth`.
#[derive(Debug, Clone)]
pub struct PersistenceDiagram {
    /// Homology dimension, 0 or 1.
    pub dim: usize,
    points: Vec<(f64, f64)>,
}

impl PersistenceDiagram {
    /// Build a diagram, dropping nothing; callers must pass finite pairs.
    pub fn new(dim: usize, points: Vec<(f64, f64)>) -> Self {
        debug_assert!(points.iter().all(|(b, d)| d > b));
        Self { dim, points }
    }

    /// The `(birth, death)` pairs.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when the diagram has no finite points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points alive at threshold `t`: born at or before, dead strictly after.
    pub fn alive_at(&self, t: f64) -> usize {
        self.points.iter().filter(|(b, d)| *b <= t && t < *d).count()
    }
}

/// Separable Gaussian blur with truncation radius `ceil(4 sigma)` and
/// reflecting boundary (edge pixels repeated: `... c b a | a b c ...`).
pub fn gaussian_smooth(frame: &ImageFrame, sigma: f64) -> ImageFrame {
    assert!(sigma > 0.0 && sigma.is_finite());
    let radius = (4.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|w| *w /= total);

    let (rows, cols) = (frame.rows, frame.cols);
    let reflect = |mut i: isize, n: isize| -> usize {
        loop {
            if i < 0 {
                i = -i - 1;
            } else if i >= n {
                i = 2 * n - 1 - i;
            } else {
                return i as usize;
            }
        }
    };

    // Horizontal pass, then vertical.
    let mut tmp = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let mut acc = 0.0;
            for (t, w) in kernel.iter().enumerate() {
                let cc = reflect(c as isize + t as isize - radius, cols as isize);
                acc += w * frame.pixels[r * cols + cc];
            }
            tmp[r * cols + c] = acc;
        }
    }
    let mut out = vec![0.0; rows * cols];
    for c in 0..cols {
        for r in 0..rows {
            let mut acc = 0.0;
            for (t, w) in kernel.iter().enumerate() {
                let rr = reflect(r as isize + t as isize - radius, rows as isize);
                acc += w * tmp[rr * cols + c];
            }
            out[r * cols + c] = acc;
        }
    }
    ImageFrame {
        rows,
        cols,
        pixels: out,
    }
}

/// Shift and scale a frame so the pixel mean is 0 and the pixel mean square
/// is 1 (population convention). Errors on constant frames.
pub fn standardize_frame(frame: &ImageFrame) -> Result<ImageFrame> {
    let n = frame.pixels.len() as f64;
    let mean = frame.pixels.iter().sum::<f64>() / n;
    let var = frame
        .pixels
        .iter()
        .map(|p| (p - mean) * (p - mean))
        .sum::<f64>()
        / n;
    if var < 1e-12 {
        return Err(Error::ZeroVarianceFrame { frame: None });
    }
    let sd = var.sqrt();
    Ok(ImageFrame {
        rows: frame.rows,
        cols: frame.cols,
        pixels: frame.pixels.iter().map(|p| (p - mean) / sd).collect(),
    })
}

/// Both persistence diagrams of the sublevel filtration.
pub fn sublevel_pd(frame: &ImageFrame) -> (PersistenceDiagram, PersistenceDiagram) {
    let pd0 = PersistenceDiagram::new(
        0,
        elder_sweep(frame.rows, frame.cols, &frame.pixels, false, false),
    );
    let negated: Vec<f64> = frame.pixels.iter().map(|p| -p).collect();
    let dual = elder_sweep(frame.rows, frame.cols, &negated, true, true);
    let pd1 = PersistenceDiagram::new(
        1,
        dual.into_iter().map(|(b, d)| (-d, -b)).collect(),
    );
    (pd0, pd1)
}

const INACTIVE: usize = usize::MAX;

struct Forest {
    parent: Vec<usize>,
    birth_val: Vec<f64>,
    birth_pos: Vec<usize>,
}

impl Forest {
    fn new(nodes: usize) -> Self {
        Self {
            parent: vec![INACTIVE; nodes],
            birth_val: vec![0.0; nodes],
            birth_pos: vec![0; nodes],
        }
    }

    fn activate(&mut self, node: usize, value: f64, pos: usize) {
        self.parent[node] = node;
        self.birth_val[node] = value;
        self.birth_pos[node] = pos;
    }

    fn find(&mut self, mut node: usize) -> usize {
        while self.parent[node] != node {
            self.parent[node] = self.parent[self.parent[node]];
            node = self.parent[node];
        }
        node
    }
}

/// Elder-rule union-find sweep over pixels in increasing (value, index)
/// order. Returns the finite `(birth, death)` pairs; zero-persistence merges
/// and the essential component are not recorded.
///
/// `eight_conn` switches from edge-adjacency to edge-or-corner adjacency.
/// `with_outside` adds a virtual region adjacent to every border pixel that
/// is older than everything else (used by the dual pass).
fn elder_sweep(
    rows: usize,
    cols: usize,
    values: &[f64],
    eight_conn: bool,
    with_outside: bool,
) -> Vec<(f64, f64)> {
    let n = rows * cols;
    let outside = n;
    let mut forest = Forest::new(n + usize::from(with_outside));
    if with_outside {
        forest.activate(outside, f64::NEG_INFINITY, 0);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|a, b| values[*a].total_cmp(&values[*b]).then(a.cmp(b)));

    let offsets_4: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
    let offsets_8: [(isize, isize); 8] = [
        (-1, -1),
        (-1, 0),
        (-1, 1),
        (0, -1),
        (0, 1),
        (1, -1),
        (1, 0),
        (1, 1),
    ];
    let offsets: &[(isize, isize)] = if eight_conn { &offsets_8 } else { &offsets_4 };

    let mut points = Vec::new();
    for (pos, &p) in order.iter().enumerate() {
        let v = values[p];
        forest.activate(p, v, pos + 1);
        let (r, c) = ((p / cols) as isize, (p % cols) as isize);

        let merge = |forest: &mut Forest, q: usize, points: &mut Vec<(f64, f64)>| {
            if forest.parent[q] == INACTIVE {
                return;
            }
            let rp = forest.find(p);
            let rq = forest.find(q);
            if rp == rq {
                return;
            }
            let (older, younger) = if forest.birth_pos[rp] < forest.birth_pos[rq] {
                (rp, rq)
            } else {
                (rq, rp)
            };
            if v > forest.birth_val[younger] {
                points.push((forest.birth_val[younger], v));
            }
            forest.parent[younger] = older;
        };

        for (dr, dc) in offsets {
            let (nr, nc) = (r + dr, c + dc);
            if nr < 0 || nr >= rows as isize || nc < 0 || nc >= cols as isize {
                continue;
            }
            merge(&mut forest, (nr as usize) * cols + nc as usize, &mut points);
        }
        if with_outside && (r == 0 || c == 0 || r == rows as isize - 1 || c == cols as isize - 1) {
            merge(&mut forest, outside, &mut points);
        }
    }
    points
}
