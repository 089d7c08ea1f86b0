use gpt_spectra::catalog::*;
use nalgebra::DVector;

fn main() {
    // scan the egg for states with several antipodal decompositions and
    // report the largest sup-norm difference between sorted prob vectors
    let sys = make_ellipse(2.0, 1.0).unwrap();
    let mut best = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for ix in -30..=30 {
        for iy in -30..=30 {
            let x = ix as f64 / 31.0 * 1.8;
            let y = iy as f64 / 31.0 * 0.9;
            let coords = DVector::from_vec(vec![1.0, x, y]);
            if sys.cone_margin(&coords) < 0.05 {
                continue;
            }
            let omega = match sys.state(coords) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let dec = ellipse::diameters_through(&sys, &omega);
            if dec.len() < 2 {
                continue;
            }
            let mut lo = 1.0f64;
            let mut hi = 0.0f64;
            for (_, mu) in &dec {
                let top = mu.max(1.0 - mu);
                lo = lo.min(top);
                hi = hi.max(top);
            }
            let diff = hi - lo;
            if diff > best.0 {
                best = (diff, x, y, dec.len());
            }
        }
    }
    println!("egg(2,1): best sup-diff {:.4} at ({:.3},{:.3}) with {} chords", best.0, best.1, best.2, best.3);

    // same scan for a=1.5,b=1 and a=3,b=1 to see the trend
    for (a, b) in [(1.5, 1.0), (3.0, 1.0)] {
        let sys = make_ellipse(a, b).unwrap();
        let mut best = 0.0f64;
        for ix in -30..=30 {
            for iy in -30..=30 {
                let x = ix as f64 / 31.0 * (a - 0.2);
                let y = iy as f64 / 31.0 * (b - 0.1);
                let coords = DVector::from_vec(vec![1.0, x, y]);
                if sys.cone_margin(&coords) < 0.05 { continue; }
                let omega = match sys.state(coords) { Ok(s) => s, Err(_) => continue };
                let dec = ellipse::diameters_through(&sys, &omega);
                if dec.len() < 2 { continue; }
                let mut lo = 1.0f64; let mut hi = 0.0f64;
                for (_, mu) in &dec {
                    let top = mu.max(1.0 - mu);
                    lo = lo.min(top); hi = hi.max(top);
                }
                best = best.max(hi - lo);
            }
        }
        println!("egg({a},{b}): best sup-diff {best:.4}");
    }
}
