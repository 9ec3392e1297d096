//! Uniform-grid index over feature bounding boxes, used to prune candidate
//! pairs before the exact overlap test. Purely an optimization: queries
//! return a superset of the boxes intersecting the query rectangle, never
//! missing one.

use crate::geometry::Rect;

#[derive(Debug)]
pub struct GridIndex {
    bounds: Rect,
    cell: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
    len: usize,
}

impl GridIndex {
    /// Cell size follows the median bounding-box diagonal, so typical
    /// buildings land in a handful of cells.
    pub fn build(boxes: &[Rect]) -> GridIndex {
        if boxes.is_empty() {
            return GridIndex {
                bounds: Rect {
                    min_x: 0.0,
                    min_y: 0.0,
                    max_x: 0.0,
                    max_y: 0.0,
                },
                cell: 1.0,
                cols: 0,
                rows: 0,
                cells: Vec::new(),
                len: 0,
            };
        }
        let mut bounds = boxes[0];
        let mut diagonals: Vec<f64> = Vec::with_capacity(boxes.len());
        for b in boxes {
            bounds = bounds.union(b);
            diagonals.push((b.width().powi(2) + b.height().powi(2)).sqrt());
        }
        diagonals.sort_by(f64::total_cmp);
        let cell = diagonals[diagonals.len() / 2].max(1e-9);
        let cols = ((bounds.width() / cell).ceil() as usize).max(1);
        let rows = ((bounds.height() / cell).ceil() as usize).max(1);
        let mut cells = vec![Vec::new(); cols * rows];
        let mut index = GridIndex {
            bounds,
            cell,
            cols,
            rows,
            cells: Vec::new(),
            len: boxes.len(),
        };
        for (i, b) in boxes.iter().enumerate() {
            let (c0, r0, c1, r1) = index.cell_range(b);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    cells[r * cols + c].push(i as u32);
                }
            }
        }
        index.cells = cells;
        index
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Indices of candidate boxes for `rect`, sorted and deduplicated.
    pub fn query(&self, rect: &Rect) -> Vec<u32> {
        if self.len == 0 || !self.bounds.intersects(rect) {
            return Vec::new();
        }
        let (c0, r0, c1, r1) = self.cell_range(rect);
        let mut out = Vec::new();
        for r in r0..=r1 {
            for c in c0..=c1 {
                out.extend_from_slice(&self.cells[r * self.cols + c]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn cell_range(&self, rect: &Rect) -> (usize, usize, usize, usize) {
        let clamp_col = |x: f64| -> usize {
            let c = ((x - self.bounds.min_x) / self.cell).floor();
            (c.max(0.0) as usize).min(self.cols - 1)
        };
        let clamp_row = |y: f64| -> usize {
            let r = ((y - self.bounds.min_y) / self.cell).floor();
            (r.max(0.0) as usize).min(self.rows - 1)
        };
        (
            clamp_col(rect.min_x),
            clamp_row(rect.min_y),
            clamp_col(rect.max_x),
            clamp_row(rect.max_y),
        )
    }
}
