//! Characteristic impedance of a single CPW line and the per-length matrices
//! of a two-line coupler.
use lumpline::cpw::{coupler_matrices, single_line_z0, CpwCrossSection};

fn main() -> lumpline::Result<()> {
    let eps_r = 11.9;
    for (w, g) in [(10e-6, 6e-6), (15e-6, 10e-6), (4e-6, 12e-6)] {
        println!("w = {:>4.1} µm, g = {:>4.1} µm: Z0 = {:.3} Ω", w * 1e6, g * 1e6, single_line_z0(w, g, eps_r)?);
    }

    let cs = CpwCrossSection::new(vec![10e-6, 10e-6], vec![6e-6, 5e-6, 6e-6], eps_r)?;
    let m = coupler_matrices(&cs)?;
    println!("\ncoupler, gaps 6/5/6 µm");
    println!("C [pF/m] = {:.4}", m.c_pul * 1e12);
    println!("L [nH/m] = {:.4}", m.l_pul * 1e9);
    println!("Z [Ω] = {:.4}", m.z_char);
    Ok(())
}
