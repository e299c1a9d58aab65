//! Brute-force float oracle for fold enumeration: a grid scan with
//! bisection (and ternary refinement for tangential touches), entirely
//! independent of the exact preimage-tree path it cross-checks.

/// `T_s` in plain floating point.
pub fn tent(s: f64, x: f64) -> f64 {
    (s * x).min(s * (1.0 - x))
}

pub fn tent_iter(s: f64, x: f64, k: usize) -> f64 {
    let mut y = x;
    for _ in 0..k {
        y = tent(s, y);
    }
    y
}

/// All solutions of `T^j(u) = 1/2` on `[0, 1/2]` for `j = 0..=n`, each with
/// the smallest `j` solving it. Returned sorted by `u`.
pub fn grid_roots(s: f64, n: usize) -> Vec<(f64, usize)> {
    let mut roots: Vec<(f64, usize)> = Vec::new();
    let merge_tol = 1e-10;
    for j in 0..=n {
        for u in roots_one_level(s, j, n) {
            match roots
                .iter_mut()
                .find(|(v, _)| (*v - u).abs() < merge_tol)
            {
                Some((_, jj)) => *jj = (*jj).min(j),
                None => roots.push((u, j)),
            }
        }
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    roots
}

fn roots_one_level(s: f64, j: usize, n: usize) -> Vec<f64> {
    let c = 0.5;
    let f = |u: f64| tent_iter(s, u, j) - c;
    // Grid fine enough to isolate every root at the deepest level in play.
    let steps = (16.0 * s.powi(n as i32 + 1)).ceil() as usize;
    let h = 0.5 / steps as f64;
    let mut out = Vec::new();

    let mut prev = f(0.0);
    for i in 1..=steps {
        let u = i as f64 * h;
        let cur = f(u);
        if prev == 0.0 {
            out.push((i - 1) as f64 * h);
        } else if cur != 0.0 && (prev < 0.0) != (cur < 0.0) {
            out.push(bisect(&f, (i - 1) as f64 * h, u));
        }
        prev = cur;
    }
    if prev == 0.0 {
        out.push(0.5);
    }

    // Tangential touches: local minima of |f| that bisection cannot see.
    let mut window: Vec<(f64, f64)> = Vec::new();
    for i in 0..=steps {
        let u = i as f64 * h;
        window.push((u, f(u).abs()));
        if window.len() > 3 {
            window.remove(0);
        }
        if window.len() == 3 && window[1].1 <= window[0].1 && window[1].1 <= window[2].1 {
            let (lo, hi) = (window[0].0, window[2].0);
            let (u_min, v_min) = ternary_min(&|u| f(u).abs(), lo, hi);
            if v_min < 1e-11 && !out.iter().any(|r| (r - u_min).abs() < 1e-10) {
                out.push(u_min);
            }
        }
    }
    out.retain(|u| *u >= -1e-15 && *u <= 0.5 + 1e-15);
    out
}

fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fa < 0.0) != (fm < 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

fn ternary_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) <= f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let u = 0.5 * (a + b);
    (u, f(u))
}
