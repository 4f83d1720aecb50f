mod common;

#[test]
fn closed_form_cones_match_generic_unions() {
    let t = std::time::Instant::now();
    let (n, err) = common::check_cone_grid();
    eprintln!("{n} points in {:?}", t.elapsed());
    assert!(err.is_none(), "{}", err.unwrap());
}
