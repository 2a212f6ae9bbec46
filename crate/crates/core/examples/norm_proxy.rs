//! Windowed time-DFT proxy for the Y^{s,b} norm on a free mode.

use num_complex::Complex64;

use mkdv_lab::norms::{dispersion, ysb_norm_proxy, NormProxyConfig, PhaseSymbol, Window};
use mkdv_lab::{FourierField, GridSpec, Trajectory};

fn main() {
    let grid = GridSpec::new(4, 128, 0.5).unwrap();
    let f = FourierField::cosine(4, 2.0, 3);
    // free evolution under the modified symbol, so the modified proxy sees it centred
    let z = Trajectory::from_fn(grid, |_, t| {
        let w = dispersion(3, PhaseSymbol::Modified, Some(&f));
        FourierField::real_from_modes(4, &[(3, Complex64::from_polar(1.0, w * t))])
    });
    for window in [Window::Hann, Window::Rect] {
        for phase in [PhaseSymbol::Modified, PhaseSymbol::Airy] {
            let cfg = NormProxyConfig { window, phase, ..NormProxyConfig::default() };
            println!("{window:?} {phase:?}: {:.6}", ysb_norm_proxy(&z, &cfg, Some(&f)).unwrap());
        }
    }
}
