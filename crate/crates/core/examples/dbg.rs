use qflow::fermionic::*;
use qflow::minimal_model::decompose;
use qflow::superconformal::{n2_ns_vacuum, VacuumForm};
use qflow::rat::{rat, rint};

fn main() {
    let model = decompose(2, 3).unwrap();
    let mut sys = FermionicSystem::base(&model, 1, 1).unwrap();
    sys.ground = GroundPoly { c0: rint(0), c1: rat(1, 2), c2: rint(0) };
    let ext = extend_system(&sys, ExtendTarget::N2Ns).unwrap();
    let out = fermi_char(&ext, rint(8)).unwrap();
    println!("fermi : {}", out.series);
    let chi = n2_ns_vacuum(2, 3, VacuumForm::Product, rint(8)).unwrap();
    let z1 = chi.body_zq().unwrap().set_z_one();
    println!("vacuum: {}", z1);
    // the independent closed form sum_n q^n (-q^{1/2})_n^2/(q)_{2n}
    use qflow::qseries::*;
    let order = rint(8);
    let mut rhs = QSeries::zero(Validity::UpTo(order));
    for n in 0..=8 {
        let poch = pochhammer(&SignedMonomial::minus(rat(1, 2)), n, order).unwrap();
        let r2n = pochhammer(&SignedMonomial::plus(rint(1)), 2*n, order).unwrap().reciprocal(order).unwrap();
        let term = QSeries::qpow(rint(n)).mul(&poch).mul(&poch).mul(&r2n);
        rhs = rhs.add(&term.truncate(Validity::UpTo(order)));
    }
    println!("closed: {}", rhs);
}
