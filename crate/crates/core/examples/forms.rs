//! Symbolic coefficients, wedge products and the exterior derivative on ℂ³.

use pklab::exterior::{Coframe, Frame};
use pklab::pkahler::{metric_predicates, standard_omega};
use pklab::symexpr::{Expr, Var};

fn main() -> pklab::Result<()> {
    let fr = Frame::real_coordinates(3);
    let (z1, dz1, dz2, dz3) = (fr.z(1)?, fr.dz(1)?, fr.dz(2)?, fr.dz(3)?);

    // exact Gaussian-rational arithmetic with rational functions of a parameter
    let t = Expr::var(&Var::real_parameter("t"));
    let q = Expr::one().checked_div(&(Expr::one() + &t * &t)).unwrap();
    println!("(1/(1+t^2))' = {}", q.diff(&Var::real_parameter("t")));

    // the Iwasawa coframe and its structure equation
    let phi3 = &dz3 - &dz2.scale(&z1);
    println!("d(phi3) = {}", fr.d(&phi3)?);
    println!("d(d(phi3)) = 0: {}", fr.d(&fr.d(&phi3)?)?.is_zero());

    let cf = Coframe::new(&[dz1, dz2, phi3], "phi")?;
    let omega = cf.to_parent(&standard_omega(cf.basis()))?;
    println!("omega = {omega}");
    let in_cf = cf.to_coframe(&fr.d(&omega)?)?;
    println!("d(omega) in the coframe = {in_cf}, types {:?}", in_cf.bidegrees()?);

    let m = metric_predicates(&omega, &fr, &cf)?;
    println!("kahler {}, balanced {}", m.kahler, m.balanced);
    Ok(())
}
