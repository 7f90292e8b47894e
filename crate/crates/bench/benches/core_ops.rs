use autostruct::equiv::{build_e_good, census, equiv_from_poly, ClassSize};
use autostruct::fo::{Engine, Formula};
use autostruct::trees::{build_d2, unfold_dag};
use criterion::{criterion_group, criterion_main, Criterion};

fn automata(c: &mut Criterion) {
    c.bench_function("poly_automaton_conv", |b| b.iter(autostruct_bench::sample_poly_automaton));
    let (a, w) = autostruct_bench::sharp_fixture(40);
    c.bench_function("count_runs_sharp_40", |b| b.iter(|| a.count_accepting_runs(&w).unwrap()));
    let conv = autostruct_bench::sample_poly_automaton();
    c.bench_function("minimize_conv", |b| b.iter(|| conv.minimize().unwrap()));
}

fn fo(c: &mut Criterion) {
    let g = build_e_good().unwrap();
    let engine = Engine::new(g.presentation()).unwrap();
    let transitive: Formula = "(forall (x y z) (implies (and (E x y) (E y z)) (E x z)))".parse().unwrap();
    let mut group = c.benchmark_group("fo");
    group.sample_size(10);
    group.bench_function("transitivity_e_good", |b| b.iter(|| engine.decide(&transitive).unwrap()));
    group.finish();
}

fn structures(c: &mut Criterion) {
    let e = equiv_from_poly(&"x1*x1+1".parse().unwrap(), 1).unwrap();
    let sizes: Vec<ClassSize> = (1..=30).map(ClassSize::Finite).collect();
    c.bench_function("census_x1_squared_30", |b| b.iter(|| census(&e, &sizes).unwrap()));

    let d = build_d2(&"x1".parse().unwrap(), &"x2".parse().unwrap(), 1, 2).unwrap();
    c.bench_function("unfold_d2", |b| b.iter(|| unfold_dag(&d, false).unwrap()));
}

criterion_group!(benches, automata, fo, structures);
criterion_main!(benches);
