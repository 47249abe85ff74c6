/// Solves `min ‖A W − B‖² + ridge·‖W‖²` for `W`.
///
/// `a` is row-major `rows × cols`, `b` is row-major `rows × nrhs`; the result
/// is row-major `cols × nrhs`. Uses Householder QR on the stacked system
/// `[A; √ridge·I] W = [B; 0]`, which avoids squaring the condition number.
/// `ridge` must be positive so that the stacked matrix has full column rank.
pub fn ridge_least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64], nrhs: usize, ridge: f64) -> Vec<f64> {
    assert_eq!(a.len(), rows * cols, "A has the wrong size");
    assert_eq!(b.len(), rows * nrhs, "B has the wrong size");
    assert!(ridge > 0.0, "ridge must be positive");
    let n = rows + cols;
    // Column-major copies of the stacked system.
    let mut qa = vec![0.0; n * cols];
    let mut qb = vec![0.0; n * nrhs];
    for i in 0..rows {
        for j in 0..cols {
            qa[j * n + i] = a[i * cols + j];
        }
        for j in 0..nrhs {
            qb[j * n + i] = b[i * nrhs + j];
        }
    }
    let s = ridge.sqrt();
    for j in 0..cols {
        qa[j * n + rows + j] = s;
    }

    let mut v = vec![0.0; n];
    for k in 0..cols {
        let col = &qa[k * n..(k + 1) * n];
        let norm = col[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if col[k] > 0.0 { -norm } else { norm };
        v[k..].copy_from_slice(&col[k..]);
        v[k] -= alpha;
        let vnorm2: f64 = v[k..].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |m: &mut [f64], ncols: usize| {
            for j in 0..ncols {
                let c = &mut m[j * n..(j + 1) * n];
                let dot: f64 = v[k..].iter().zip(&c[k..]).map(|(x, y)| x * y).sum();
                let f = 2.0 * dot / vnorm2;
                for (ci, vi) in c[k..].iter_mut().zip(&v[k..]) {
                    *ci -= f * vi;
                }
            }
        };
        reflect(&mut qa[k * n..], cols - k);
        reflect(&mut qb, nrhs);
    }

    // Back substitution with the upper-triangular R.
    let mut w = vec![0.0; cols * nrhs];
    for r in 0..nrhs {
        for i in (0..cols).rev() {
            let mut acc = qb[r * n + i];
            for j in (i + 1)..cols {
                acc -= qa[j * n + i] * w[j * nrhs + r];
            }
            w[i * nrhs + r] = acc / qa[i * n + i];
        }
    }
    w
}
