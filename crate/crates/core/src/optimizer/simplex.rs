//! Nelder–Mead downhill simplex over a fixed number of coordinates.

#[derive(Clone, Copy, Debug)]
pub(crate) struct SimplexOptions {
    /// Initial offset along each coordinate axis.
    pub step: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub xtol: f64,
    /// Stop once the value spread across the simplex drops below this.
    pub ftol: f64,
    pub max_evals: usize,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SimplexOutcome<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
}

/// Minimizes `f` starting from `x0` whose value `f0` is already known.
pub(crate) fn nelder_mead<const N: usize, F>(
    mut f: F,
    x0: [f64; N],
    f0: f64,
    opts: &SimplexOptions,
) -> SimplexOutcome<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    debug_assert!(N >= 1);
    let mut pts = [[0.0; N]; 16];
    let mut vals = [0.0; 16];
    assert!(N < pts.len(), "simplex dimension too large");
    pts[0] = x0;
    vals[0] = f0;
    let mut evals = 0;
    for i in 0..N {
        let mut p = x0;
        p[i] += opts.step;
        pts[i + 1] = p;
        vals[i + 1] = f(&p);
        evals += 1;
    }
    let n = N + 1;

    loop {
        // insertion sort keeps the ordering stable for equal values
        for i in 1..n {
            let mut j = i;
            while j > 0 && vals[j] < vals[j - 1] {
                vals.swap(j, j - 1);
                pts.swap(j, j - 1);
                j -= 1;
            }
        }
        let spread = vals[N] - vals[0];
        let size = (1..n)
            .map(|i| {
                pts[i]
                    .iter()
                    .zip(&pts[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if size <= opts.xtol
            || (spread <= opts.ftol && size <= opts.step)
            || evals >= opts.max_evals
        {
            break;
        }

        let mut centroid = [0.0; N];
        for p in &pts[..N] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / N as f64;
            }
        }
        let along = |t: f64| {
            let mut q = [0.0; N];
            for k in 0..N {
                q[k] = centroid[k] + t * (pts[N][k] - centroid[k]);
            }
            q
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[N] = xe;
                vals[N] = fe;
            } else {
                pts[N] = xr;
                vals[N] = fr;
            }
            continue;
        }
        if fr < vals[N - 1] {
            pts[N] = xr;
            vals[N] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[N] {
            let xc = along(-0.5);
            (xc, f(&xc))
        } else {
            let xc = along(0.5);
            (xc, f(&xc))
        };
        evals += 1;
        if fc < vals[N].min(fr) {
            pts[N] = xc;
            vals[N] = fc;
            continue;
        }
        for i in 1..n {
            let best = pts[0];
            for (p, b) in pts[i].iter_mut().zip(best) {
                *p = b + 0.5 * (*p - b);
            }
            vals[i] = f(&pts[i]);
            evals += 1;
        }
    }

    SimplexOutcome {
        x: pts[0],
        value: vals[0],
    }
}
