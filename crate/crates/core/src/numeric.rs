//! Small numeric helpers shared across modules.

/// Compensated (Kahan) accumulator.
///
/// Long positive sums appear in the nonlocal stencil (up to N_eta = 500
/// terms) and in the mass/flux bookkeeping; compensation keeps their rounding
/// well below the tolerances the diagnostics assert.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated sum of a slice.
pub(crate) fn kahan_sum(values: &[f64]) -> f64 {
    let mut acc = Kahan::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// floor(num/den) robust against the quotient sitting one rounding error
/// below an integer (e.g. 0.5/1e-3). Ratios within 1e-9 relative of an
/// integer snap to it before flooring.
pub(crate) fn robust_floor_ratio(num: f64, den: f64) -> usize {
    let ratio = num / den;
    let snapped = ratio + 1e-9 * ratio.abs().max(1.0);
    snapped.floor().max(0.0) as usize
}
