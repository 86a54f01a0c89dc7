//! The bundled acceptance checks behind `corpus run`. Details are kept free
//! of timings so that reports stay comparable between runs.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheaf_core::corpus;
use sheaf_core::exactalg::{cohomology_at, hom_parts, smith_normal_form, FpGroup, GroupHom, IntMatrix, Invariants};
use sheaf_core::godement::{godement_resolution, godement_step, is_flasque, lim_higher_oracle, sheaf_cohomology};
use sheaf_core::random::random_double_complex;
use sheaf_core::sheaves::{check_sheaf_axioms, global_sections, minimal_open_cover, sections_left_exactness, PresheafTable};
use sheaf_core::spectral::{acyclic_resolution_check, hypercohomology, spectral_sequence, AcyclicVerdict, Axis, SheafComplex};

pub type Outcome = Result<String, String>;

pub struct Criterion {
    pub number: usize,
    pub name: &'static str,
    run: fn(usize) -> Outcome,
}

impl Criterion {
    pub fn run(&self, opens_cap: usize) -> Outcome {
        (self.run)(opens_cap)
    }
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { number: 1, name: "H0 equals global sections", run: h0_is_sections },
    Criterion { number: 2, name: "circle model (Z, Z, 0)", run: circle_model },
    Criterion { number: 3, name: "sphere model (Z, 0, Z, 0)", run: sphere_model },
    Criterion { number: 4, name: "flasque implies acyclic", run: flasque_acyclic },
    Criterion { number: 5, name: "convergence on random double complexes", run: convergence },
    Criterion { number: 6, name: "hypercohomology degeneration", run: hyper_degeneration },
    Criterion { number: 7, name: "acyclic-resolution theorem", run: acyclic_theorem },
    Criterion { number: 8, name: "left exactness and the H1 witness", run: left_exactness_witness },
    Criterion { number: 9, name: "exact-algebra suite", run: exact_algebra },
    Criterion { number: 10, name: "sheaf-axiom checker", run: sheaf_axioms },
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn invariants(groups: &[FpGroup]) -> Vec<Invariants> {
    groups.iter().map(|g| g.invariants().clone()).collect()
}

fn shown(groups: &[FpGroup]) -> String {
    groups.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
}

fn h0_is_sections(_: usize) -> Outcome {
    let entries = corpus::entries();
    ensure(entries.len() >= 10, || format!("only {} corpus pairs", entries.len()))?;
    for e in &entries {
        let h0 = sheaf_cohomology(&e.sheaf, 0).remove(0);
        let gamma = global_sections(&e.sheaf);
        ensure(h0.invariants() == gamma.group().invariants(), || {
            format!("{}/{}: H0 = {h0}, sections = {}", e.space_name, e.sheaf_name, gamma.group())
        })?;
    }
    Ok(format!("{} pairs", entries.len()))
}

fn both_pipelines(space: &str, expected: &[usize]) -> Outcome {
    let x = corpus::space(space).unwrap();
    let f = corpus::sheaf(&x, space, "constZ").map_err(|e| e.to_string())?;
    let kmax = expected.len() - 1;
    let want: Vec<Invariants> = expected.iter().map(|&r| Invariants::free(r)).collect();
    let godement = sheaf_cohomology(&f, kmax);
    let oracle = lim_higher_oracle(&f, kmax);
    ensure(invariants(&godement) == want, || format!("Godement pipeline gave ({})", shown(&godement)))?;
    ensure(invariants(&oracle) == want, || format!("oracle gave ({})", shown(&oracle)))?;
    Ok(format!("({}) by both pipelines", shown(&godement)))
}

fn circle_model(_: usize) -> Outcome {
    both_pipelines("pseudocircle", &[1, 1, 0])
}

fn sphere_model(_: usize) -> Outcome {
    both_pipelines("sphere2", &[1, 0, 1, 0])
}

fn flasque_acyclic(cap: usize) -> Outcome {
    let mut sheaves = Vec::new();
    for e in corpus::entries() {
        let res = godement_resolution(&e.sheaf, 1);
        for (p, c) in res.terms().iter().enumerate() {
            sheaves.push((format!("C^{p} of {}/{}", e.space_name, e.sheaf_name), c.clone()));
        }
    }
    sheaves.extend(corpus::closed_point_skyscrapers());
    for (name, f) in &sheaves {
        ensure(is_flasque(f, cap).map_err(|e| e.to_string())?, || format!("{name} is not flasque"))?;
        let h = sheaf_cohomology(f, 3);
        ensure(h[1..].iter().all(|g| g.is_trivial()), || format!("{name} has H^k = ({})", shown(&h)))?;
    }
    Ok(format!("{} flasque sheaves acyclic in degrees 1-3", sheaves.len()))
}

fn convergence(_: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut higher = 0;
    for i in 0..100 {
        let k = random_double_complex(&mut rng);
        for axis in [Axis::ByP, Axis::ByQ] {
            let ss = spectral_sequence(&k, axis, 6).map_err(|e| format!("complex {i}: {e}"))?;
            let r = ss.recurrence_failures();
            ensure(r.is_empty(), || format!("complex {i} {}: recurrence fails at {r:?}", axis.name()))?;
            ensure(ss.differentials_well_formed(), || format!("complex {i} {}: bad d_r", axis.name()))?;
            let c = ss.convergence_failures();
            ensure(c.is_empty(), || format!("complex {i} {}: einf differs from graded at {c:?}", axis.name()))?;
            ensure(ss.rank_sums_agree(), || format!("complex {i} {}: rank sums differ", axis.name()))?;
            if ss.pages[2..].iter().any(|p| !p.all_differentials_zero()) {
                higher += 1;
            }
        }
    }
    Ok(format!("100 complexes x 2 axes ({higher} runs with nonzero d_r, r >= 2)"))
}

fn hyper_degeneration(_: usize) -> Outcome {
    let kmax = 2;
    let entries = corpus::entries();
    for e in &entries {
        let name = format!("{}/{}", e.space_name, e.sheaf_name);
        let h = hypercohomology(e.sheaf.space(), &SheafComplex::single(&e.sheaf), kmax).map_err(|err| err.to_string())?;
        let direct = sheaf_cohomology(&e.sheaf, kmax);
        ensure(invariants(&h.groups) == invariants(&direct), || format!("{name}: hypercohomology differs"))?;
        let support = h.by_p.support(1, Some(kmax));
        ensure(support.iter().all(|&(_, q)| q == 0), || format!("{name}: E_1 off row 0 at {support:?}"))?;
        let page = h.by_p.degeneration_page(Some(kmax));
        ensure(page <= 2, || format!("{name}: degenerates only at E_{page}"))?;
        ensure(h.by_p.extension_flags.iter().all(|&n| n > kmax), || {
            format!("{name}: extension flags {:?}", h.by_p.extension_flags)
        })?;
    }
    Ok(format!("{} single-sheaf complexes degenerate at E_2", entries.len()))
}

fn acyclic_theorem(_: usize) -> Outcome {
    let kmax = 2;
    let entries = corpus::entries();
    for e in &entries {
        let res = godement_resolution(&e.sheaf, kmax).resolution;
        let rep = acyclic_resolution_check(&res, kmax).map_err(|err| err.to_string())?;
        ensure(rep.holds(), || format!("{}/{}: verdict {:?}", e.space_name, e.sheaf_name, rep.verdict))?;
    }
    let hand = corpus::resolution("sierpinski_skyscrapers").unwrap();
    let rep = acyclic_resolution_check(&hand, kmax).map_err(|err| err.to_string())?;
    ensure(rep.holds(), || format!("hand-built resolution: {:?}", rep.verdict))?;
    let bad = corpus::resolution("pseudocircle_constant_term").unwrap();
    let rep = acyclic_resolution_check(&bad, kmax).map_err(|err| err.to_string())?;
    ensure(rep.verdict == AcyclicVerdict::NotAcyclic { term: 0, degree: 1 }, || {
        format!("constant term verdict {:?}", rep.verdict)
    })?;
    Ok(format!("{} Godement resolutions and a hand-built one pass; constant Z term flagged at L^0, H^1", entries.len()))
}

fn left_exactness_witness(_: usize) -> Outcome {
    let x = corpus::space("pseudocircle").unwrap();
    let f = corpus::sheaf(&x, "pseudocircle", "constZ").map_err(|e| e.to_string())?;
    let step = godement_step(&f);
    let rep = sections_left_exactness(&step.unit, &step.projection, &x.whole()).map_err(|e| e.to_string())?;
    ensure(rep.left_exact, || "0 -> F(X) -> C0F(X) -> Q1(X) is not exact".into())?;
    ensure(!rep.surjective, || "C0F(X) -> Q1(X) is onto".into())?;
    let h1 = sheaf_cohomology(&f, 1).remove(1);
    ensure(rep.cokernel.invariants() == h1.invariants(), || format!("cokernel {} vs H1 {h1}", rep.cokernel))?;
    Ok(format!("cokernel {} = H^1", rep.cokernel))
}

fn unimodular(d: &BigInt) -> bool {
    *d == BigInt::from(1) || *d == BigInt::from(-1)
}

fn exact_algebra(_: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let zero = BigInt::from(0);
    for i in 0..200 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-20..=20)).collect()).collect();
        let m = IntMatrix::from_i64_rows(&rows, c).map_err(|e| e.to_string())?;
        let snf = smith_normal_form(&m);
        ensure(&(&snf.u * &m) * &snf.v == snf.s, || format!("matrix {i}: U M V != S"))?;
        ensure(unimodular(&snf.u.determinant().map_err(|e| e.to_string())?), || format!("matrix {i}: U not unimodular"))?;
        ensure(unimodular(&snf.v.determinant().map_err(|e| e.to_string())?), || format!("matrix {i}: V not unimodular"))?;
        let d = snf.diagonal();
        let divides = d.windows(2).all(|w| w[1] == zero || (w[0] != zero && &w[1] % &w[0] == zero));
        ensure(divides, || format!("matrix {i}: diagonal {d:?}"))?;
        let f = GroupHom::new(FpGroup::free(c), FpGroup::free(r), m).map_err(|e| e.to_string())?;
        let parts = hom_parts(&f);
        let incl = parts.kernel.inclusion().map_err(|e| e.to_string())?;
        let proj = parts.cokernel.projection().map_err(|e| e.to_string())?;
        let zero_in = GroupHom::zero(FpGroup::trivial(), incl.source().clone());
        let zero_out = GroupHom::zero(proj.target().clone(), FpGroup::trivial());
        let chain = [zero_in, incl, f, proj, zero_out];
        for (k, w) in chain.windows(2).enumerate() {
            let h = cohomology_at(&w[0], &w[1]).map_err(|e| format!("matrix {i}, position {k}: {e}"))?;
            ensure(h.group().is_trivial(), || format!("matrix {i}: not exact at position {k}"))?;
        }
    }
    Ok("200 matrices".into())
}

fn sheaf_axioms(cap: usize) -> Outcome {
    let x = corpus::space("discrete2").unwrap();
    let table = PresheafTable::constant_functions(&x, &FpGroup::free(1), cap).map_err(|e| e.to_string())?;
    let cover = minimal_open_cover(&x, &x.whole());
    let rep = check_sheaf_axioms(&table, &x.whole(), &cover).map_err(|e| e.to_string())?;
    ensure(rep.uniqueness && !rep.gluing, || format!("constant functions: {rep:?}"))?;
    let entries = corpus::entries();
    for e in &entries {
        let x = e.sheaf.space();
        let table = PresheafTable::from_sheaf(&e.sheaf, cap).map_err(|err| err.to_string())?;
        for u in table.opens().to_vec() {
            let cover = minimal_open_cover(x, &u);
            let rep = check_sheaf_axioms(&table, &u, &cover).map_err(|err| err.to_string())?;
            ensure(rep.uniqueness && rep.gluing, || format!("{}/{} fails on {}", e.space_name, e.sheaf_name, x.describe(&u)))?;
        }
    }
    Ok(format!("counterexample reproduced (obstruction {}); {} corpus sheaves pass", rep.obstruction, entries.len()))
}
