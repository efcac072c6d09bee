use num_complex::Complex64;

/// Two-pass sample moments of a complex sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub n: usize,
    pub mean: Complex64,
    /// `E|x - mean|^2` with the `1/(n - 1)` correction.
    pub variance: f64,
    pub var_re: f64,
    pub var_im: f64,
    /// Fourth central moment `E|x - mean|^4`.
    pub m4: f64,
}

impl SampleMoments {
    pub fn of(xs: &[Complex64]) -> Self {
        let n = xs.len();
        let nf = n as f64;
        let mean = xs.iter().sum::<Complex64>() / nf;
        let (mut vr, mut vi, mut m4) = (0.0, 0.0, 0.0);
        for x in xs {
            let d = x - mean;
            vr += d.re * d.re;
            vi += d.im * d.im;
            m4 += d.norm_sqr() * d.norm_sqr();
        }
        let denom = (nf - 1.0).max(1.0);
        Self {
            n,
            mean,
            variance: (vr + vi) / denom,
            var_re: vr / denom,
            var_im: vi / denom,
            m4: m4 / nf,
        }
    }

    pub fn of_real(xs: &[f64]) -> Self {
        let v: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::of(&v)
    }

    /// Standard error of the mean of a real sequence, or of the larger
    /// component for a complex one.
    pub fn se_mean(&self) -> f64 {
        (self.var_re.max(self.var_im) / self.n as f64).sqrt()
    }

    /// `sqrt(V / n)`: the total-variance scale used for complex means.
    pub fn se_mean_total(&self) -> f64 {
        (self.variance / self.n as f64).sqrt()
    }

    /// Asymptotic standard error of the sample variance.
    pub fn se_variance(&self) -> f64 {
        ((self.m4 - self.variance * self.variance).max(0.0) / self.n as f64).sqrt()
    }
}
