use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub(crate) fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(q);
    let mut weights = Vec::with_capacity(q);
    for i in 0..q {
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for n in 2..=q {
                let p2 = ((2 * n - 1) as f64 * x * p1 - (n - 1) as f64 * p0) / n as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes.push((1.0 - x) / 2.0);
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `∫_0^π ∫_0^π F(θ) G(φ) K(θ, φ) dθ dφ` for a kernel with an integrable singularity on
/// the diagonal. Panels away from the diagonal use tensor Gauss–Legendre; diagonal panels use
/// graded Duffy triangles and neighbouring panels a graded split around their shared corner.
/// Points with `|θ - φ| ≤ offset` are dropped.
pub(crate) fn diagonal_singular_integral<F, G, K>(
    panels: usize,
    per_panel: usize,
    offset: f64,
    f: F,
    g: G,
    kernel: K,
) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
    K: Fn(f64, f64) -> f64,
{
    let (x, w) = gauss_legendre(per_panel);
    let h = PI / panels as f64;
    let point = |t: f64, s: f64| {
        if (t - s).abs() <= offset {
            0.0
        } else {
            f(t) * g(s) * kernel(t, s)
        }
    };
    let mut total = 0.0;
    for i in 0..panels {
        for j in 0..panels {
            let (a, c) = (i as f64 * h, j as f64 * h);
            if i == j {
                for (ri, wi) in x.iter().zip(&w) {
                    let (xi, dxi) = graded(*ri, 4);
                    for (tj, wj) in x.iter().zip(&w) {
                        let (gap, dgap) = graded(*tj, 6);
                        let th = a + h * xi;
                        let ph = th - h * xi * gap;
                        total += wi * wj * h * h * xi * dxi * dgap * (point(th, ph) + point(ph, th));
                    }
                }
            } else if i.abs_diff(j) == 1 {
                let corner = a.max(c);
                let dir = if a < c { -1.0 } else { 1.0 };
                for (ri, wi) in x.iter().zip(&w) {
                    let (r, dr) = graded(*ri, 4);
                    for (tj, wj) in x.iter().zip(&w) {
                        let weight = wi * wj * h * h * r * dr;
                        for (u, v) in [(r, r * tj), (r * tj, r)] {
                            total += weight * point(corner + dir * h * u, corner - dir * h * v);
                        }
                    }
                }
            } else {
                for (xi, wi) in x.iter().zip(&w) {
                    let t = a + h * xi;
                    let ft = f(t);
                    for (xj, wj) in x.iter().zip(&w) {
                        let s = c + h * xj;
                        total += wi * wj * h * h * ft * g(s) * kernel(t, s);
                    }
                }
            }
        }
    }
    total
}

/// `r ↦ r^p` with its derivative, clustering nodes at the origin.
fn graded(r: f64, p: i32) -> (f64, f64) {
    (r.powi(p), p as f64 * r.powi(p - 1))
}
