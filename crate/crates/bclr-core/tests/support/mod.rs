//! Shared test oracles, independent of the library's algorithms.

use bclr_core::ImageFrame;

/// Union-find component count of the black pixels under 4-connectivity.
pub fn betti0_4conn(black: &[bool], rows: usize, cols: usize) -> usize {
    let mut parent: Vec<usize> = (0..rows * cols).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for r in 0..rows {
        for c in 0..cols {
            if !black[r * cols + c] {
                continue;
            }
            if r + 1 < rows && black[(r + 1) * cols + c] {
                let a = find(&mut parent, r * cols + c);
                let b = find(&mut parent, (r + 1) * cols + c);
                parent[a] = b;
            }
            if c + 1 < cols && black[r * cols + c + 1] {
                let a = find(&mut parent, r * cols + c);
                let b = find(&mut parent, r * cols + c + 1);
                parent[a] = b;
            }
        }
    }
    (0..rows * cols)
        .filter(|i| black[*i] && find(&mut parent, *i) == *i)
        .count()
}

/// Euler characteristic of the 4-connectivity continuous analog of the black
/// region: faces are the black unit squares, edges are the distinct covered
/// unit segments, and each lattice vertex is counted once per 4-connected
/// wedge of black squares around it (a diagonal pinch contributes two).
pub fn euler_4conn(black: &[bool], rows: usize, cols: usize) -> i64 {
    let at = |r: isize, c: isize| -> bool {
        r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols
            && black[r as usize * cols + c as usize]
    };

    let faces: i64 = black.iter().filter(|b| **b).count() as i64;

    // Horizontal segments between (r-1, c) and (r, c), vertical between
    // (r, c-1) and (r, c), each present when either pixel is black.
    let mut edges = 0i64;
    for r in 0..=rows as isize {
        for c in 0..cols as isize {
            if at(r - 1, c) || at(r, c) {
                edges += 1;
            }
        }
    }
    for r in 0..rows as isize {
        for c in 0..=cols as isize {
            if at(r, c - 1) || at(r, c) {
                edges += 1;
            }
        }
    }

    // Vertices: local 4-connected components of the 2 x 2 block of pixels
    // around each lattice point.
    let mut vertices = 0i64;
    for r in 0..=rows as isize {
        for c in 0..=cols as isize {
            let tl = at(r - 1, c - 1);
            let tr = at(r - 1, c);
            let bl = at(r, c - 1);
            let br = at(r, c);
            let count = match (tl, tr, bl, br) {
                (false, false, false, false) => 0,
                // Diagonal pairs are not 4-adjacent within the block.
                (true, false, false, true) | (false, true, true, false) => 2,
                _ => 1,
            };
            vertices += count;
        }
    }
    vertices - edges + faces
}

/// Betti numbers (components, holes) of the binarized frame `pixels <= t`.
pub fn betti_at_threshold(frame: &ImageFrame, t: f64) -> (usize, i64) {
    let black: Vec<bool> = frame.pixels().iter().map(|p| *p <= t).collect();
    let b0 = betti0_4conn(&black, frame.rows(), frame.cols());
    let chi = euler_4conn(&black, frame.rows(), frame.cols());
    (b0, b0 as i64 - chi)
}
