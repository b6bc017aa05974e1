use std::process::Command;

use proptest::prelude::*;

use critreg::exact_pl::rational::rat;
use critreg::exact_pl::{GenSet, PLHomeo};
use critreg::io::ActionFile;

/// Strictly increasing homeomorphism with breakpoints on the grid k/den.
fn homeo() -> impl Strategy<Value = PLHomeo> {
    (2i64..=16, proptest::collection::vec(any::<bool>(), 2..=15), proptest::collection::vec(any::<bool>(), 2..=15))
        .prop_map(|(den, xmask, ymask)| {
            let chosen = |mask: &[bool]| (1..den).filter(|&k| mask[(k as usize) % mask.len()]).collect::<Vec<_>>();
            let (xs, ys) = (chosen(&xmask), chosen(&ymask));
            let m = xs.len().min(ys.len());
            let mut pts = vec![(rat(0, 1), rat(0, 1))];
            pts.extend(xs[..m].iter().zip(&ys[..m]).map(|(&x, &y)| (rat(x, den), rat(y, den))));
            pts.push((rat(1, 1), rat(1, 1)));
            PLHomeo::new(pts).unwrap()
        })
}

fn grid_point() -> impl Strategy<Value = (i64, i64)> {
    (1i64..=64).prop_flat_map(|den| (0..=den, Just(den)))
}

proptest! {
    #[test]
    fn inverse_composes_to_identity(f in homeo()) {
        prop_assert!(f.compose(&f.inverse()).is_identity());
        prop_assert!(f.inverse().compose(&f).is_identity());
    }

    #[test]
    fn composition_is_associative(f in homeo(), g in homeo(), h in homeo()) {
        prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
    }

    #[test]
    fn maps_are_increasing(f in homeo(), (a, den) in grid_point(), (b, den2) in grid_point()) {
        let (x, y) = (rat(a, den), rat(b, den2));
        let (fx, fy) = (f.eval(&x).unwrap(), f.eval(&y).unwrap());
        prop_assert_eq!(x.cmp(&y), fx.cmp(&fy));
    }

    #[test]
    fn support_components_are_invariant_and_fixed_outside(f in homeo(), (a, den) in grid_point()) {
        let x = rat(a, den);
        let comps = f.support_components();
        let inside = comps.iter().any(|j| j.lo() < &x && &x < j.hi());
        prop_assert_eq!(inside, f.eval(&x).unwrap() != x);
        for j in &comps {
            prop_assert_eq!(&f.image(j), j);
        }
    }

    #[test]
    fn action_file_round_trips(f in homeo(), g in homeo(), budget in 1usize..8) {
        let generators: GenSet = [("f".to_string(), f), ("g".to_string(), g)].into_iter().collect();
        let file = ActionFile { name: "sample".into(), budget, generators };
        let parsed = ActionFile::parse(&file.to_text()).unwrap();
        prop_assert_eq!(parsed, file);
    }
}

#[test]
fn cli_writes_region_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("region.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_critreg"))
        .args(["feasibility", "region", "--taus", "5", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(status.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() > 1);
}

#[test]
fn cli_rejects_unknown_subcommand_with_status_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_critreg")).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
