/// Compass (coordinate pattern) search for a local maximum.
///
/// Polls `x ± step·e_i` for every coordinate, moves to the best poll point
/// if it strictly improves, and halves the step otherwise. Stops when the
/// step drops below `tolerance` or after `max_polls` evaluations. The
/// returned value is never lower than `f(x0)`.
pub fn compass_maximize<F>(
    mut f: F,
    x0: &[f64],
    initial_step: f64,
    tolerance: f64,
    max_polls: usize,
) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut step = initial_step;
    let mut polls = 0;
    let mut trial = x.clone();

    while step >= tolerance && polls < max_polls {
        let mut best: Option<(usize, f64, f64)> = None;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[i] += sign * step;
                let ft = f(&trial);
                polls += 1;
                if ft > best.map_or(fx, |b| b.2) {
                    best = Some((i, sign, ft));
                }
            }
        }
        match best {
            Some((i, sign, ft)) => {
                x[i] += sign * step;
                fx = ft;
            }
            None => step *= 0.5,
        }
    }
    (x, fx)
}
