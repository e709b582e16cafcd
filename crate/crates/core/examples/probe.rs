use std::time::Instant;
use superdatum::catalog::build_grs;
use superdatum::linalg::*;
use superdatum::superalgebra::*;
fn main() {
    let mut fams = vec![];
    for m in 1..=3 {
        for n in 1..=3 {
            fams.push(AlgebraFamily::Gl { m, n });
            if m != n {
                fams.push(AlgebraFamily::Sl { m, n });
            }
        }
    }
    for m in 1..=3 {
        fams.push(AlgebraFamily::Osp { m, n: 1 });
    }
    for a in [q(1), q(2), qf(1, 2), q(-3), qf(-2, 3)] {
        fams.push(AlgebraFamily::D21a(a));
    }
    for f in fams {
        let t = Instant::now();
        let sa = realize(&f).unwrap();
        let j = check_jacobi(&sa).is_none();
        let dec = root_decomposition(&sa).unwrap();
        let cmp = dec
            .compare_with(&sa, &build_grs(&f.catalog_family().unwrap()).unwrap())
            .unwrap();
        let forms = invariant_forms(&sa, 1);
        let w = forms.witness().is_some();
        println!(
            "{f} dim {:?} jacobi {j} cmp {:?} mono {} forms {} witness {w} {:?}",
            sa.dim(),
            cmp,
            dec.is_monodromy(),
            forms.basis.len(),
            t.elapsed()
        );
    }
}
