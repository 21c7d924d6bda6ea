use warplab_core::exec::Executor;

/// Scoped-thread executor splitting the index range into contiguous chunks.
#[allow(dead_code)]
pub struct Threads(pub usize);

impl Executor for Threads {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let chunk = n.div_ceil(self.0.max(1)).max(1);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .map(|lo| {
                    let f = &f;
                    s.spawn(move || (lo..(lo + chunk).min(n)).map(f).collect::<Vec<T>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
        })
    }
}

/// `E f(|X_t|)` for the planar OU process `dX = -δX dt + √2 dB` started at
/// radius `r`, by trapezoidal quadrature of the Gaussian kernel.
#[allow(dead_code)]
pub fn ou_semigroup<F: Fn(f64) -> f64>(delta: f64, r: f64, t: f64, f: F) -> f64 {
    let mean = (-delta * t).exp() * r;
    let sd = ((1.0 - (-2.0 * delta * t).exp()) / delta).sqrt();
    let n = 401;
    let l = 9.0;
    let dz = 2.0 * l / (n - 1) as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let z1 = -l + i as f64 * dz;
        for j in 0..n {
            let z2 = -l + j as f64 * dz;
            let w = (-0.5 * (z1 * z1 + z2 * z2)).exp();
            let x1 = mean + sd * z1;
            let x2 = sd * z2;
            acc += w * f((x1 * x1 + x2 * x2).sqrt());
        }
    }
    acc * dz * dz / (2.0 * std::f64::consts::PI)
}
