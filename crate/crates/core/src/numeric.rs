//! Small floating-point helpers shared by the kernels.

/// Neumaier's variant of compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in xs {
        acc.add(x);
    }
    acc.total()
}

/// `log(sum exp(x_i))` by a two-pass max shift; `-inf` for an empty or
/// all `-inf` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + neumaier_sum(xs.iter().map(|&x| (x - max).exp())).ln()
}

/// Moves `x` down by `k` ulps; infinities are left alone.
pub fn down(x: f64, k: u32) -> f64 {
    let mut y = x;
    for _ in 0..k {
        y = y.next_down();
    }
    if x.is_infinite() {
        x
    } else {
        y
    }
}

pub fn up(x: f64, k: u32) -> f64 {
    let mut y = x;
    for _ in 0..k {
        y = y.next_up();
    }
    if x.is_infinite() {
        x
    } else {
        y
    }
}

/// `2^-e` for `0 <= e <= 1022`, built from the bit pattern so it is exact.
pub fn pow2_neg(e: u32) -> f64 {
    assert!(e <= 1022);
    f64::from_bits(((1023 - e) as u64) << 52)
}
