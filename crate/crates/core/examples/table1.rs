//! Reassigns the 128-sample chirp with each method and window and prints the
//! reconstruction errors.

use gaborflow::chirp::{ChirpParams, ChirpSignal};
use gaborflow::reassign::{energy_rescale, reassign, reconstruction_errors, ReassignParams, UpwindScheme};
use gaborflow::{GaborParams, GaborTransform, Window, WindowKind};

fn main() -> gaborflow::Result<()> {
    let chirp = ChirpSignal { params: ChirpParams::new(0.15, 50.0)?, centre: 0.5, carrier: 32.0 };
    let f = chirp.sample(128);
    for a in [0.125, 1.0 / 6.0] {
        let p = GaborParams::paper128().with_scale(a)?;
        for kind in [WindowKind::SampledGaussian, WindowKind::DiscreteCr] {
            let tf = GaborTransform::new(p, Window::new(kind, &p)?)?;
            let g = tf.analyze(&f)?;
            let runs = [
                ("erosion", ReassignParams::erosion(0.1, a, 1.0)?),
                ("upwind", ReassignParams::upwind(0.1, 1e-3, a)?),
                ("upwind t=0.16", ReassignParams::upwind(0.16, 1e-3, a)?),
                ("upwind literal", ReassignParams::upwind(0.1, 1e-3, a)?.with_scheme(UpwindScheme::Published)),
            ];
            for (name, rp) in runs {
                match reassign(&g, &rp) {
                    Ok(out) => {
                        let rec = energy_rescale(&tf.synthesize(&out.field)?, &f)?;
                        let e = reconstruction_errors(&f, &rec)?;
                        println!("a={a:.4} {kind:?} {name}: eps1={:.3e} eps2={:.3e}", e.eps1, e.eps2);
                    }
                    Err(err) => println!("a={a:.4} {kind:?} {name}: {err}"),
                }
            }
        }
    }
    Ok(())
}
