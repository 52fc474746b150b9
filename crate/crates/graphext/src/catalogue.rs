//! Worked examples with their expected verdicts.

use graphext_core::airy::catalogue as ac;
use graphext_core::schrodinger::catalogue as sc;
use graphext_core::{MetricGraph, Verdict};

use crate::error::Result;
use crate::format::LoadedSpec;

#[derive(Debug, Clone)]
pub struct CatalogueEntry {
    pub name: String,
    pub spec: LoadedSpec,
    pub expected: Verdict,
}

fn entry(name: impl Into<String>, spec: LoadedSpec, expected: Verdict) -> CatalogueEntry {
    CatalogueEntry { name: name.into(), spec, expected }
}

fn airy_entries(out: &mut Vec<CatalogueEntry>) -> Result<()> {
    use LoadedSpec::Airy;
    use Verdict::*;
    for k in 1..=2 {
        let g = ac::alternating_graph(1.0, k, 1.0, 1.0)?;
        for z in [-2.0, 0.0, 1.0, 2.0] {
            out.push(entry(format!("airy/delta_z(k={k},z={z})"), Airy(ac::delta_z(&g, z)?), SkewSelfAdjoint));
        }
    }
    let g = ac::alternating_graph(1.0, 1, 1.0, 1.0)?;
    for (z, m) in [(1.0, 0.0), (-0.7, 2.5)] {
        out.push(entry(format!("airy/delta_cross(z={z},m={m})"), Airy(ac::delta_with_cross_term(&g, z, m)?), SkewSelfAdjoint));
    }
    for (m1, m2) in [(0.0, 0.0), (1.3, -0.4)] {
        out.push(entry(format!("airy/two_parameter(m1={m1},m2={m2})"), Airy(ac::two_parameter_unitary(&g, m1, m2)?), SkewSelfAdjoint));
    }
    for m in [[0.0; 4], [0.2, -1.0, 0.5, 2.0]] {
        out.push(entry(format!("airy/four_parameter(m={m:?})"), Airy(ac::four_parameter_unitary(&g, m)?), SkewSelfAdjoint));
    }
    out.push(entry(
        "airy/tadpole_delta(alpha0=-1,m=[0,0,-2,0])",
        Airy(ac::tadpole_delta(1.0, -1.0, [0.0, 0.0, -2.0, 0.0])?),
        ContractionGenerator,
    ));
    let tadpole = ac::uniform_tadpole(1.0, 1.0)?;
    for (m1, m2, m3) in [(0.0, 1.0, 1.0), (0.0, 0.5, -1.2), (0.5, 0.5, 0.5)] {
        out.push(entry(
            format!("airy/split_family(m=[{m1},{m2},{m3}],z=1)"),
            Airy(ac::derivative_split(&tadpole, ac::loop_line_subspace(1.0), ac::split_family_matrix(m1, m2, m3)?)?),
            ContractionGenerator,
        ));
    }
    out.push(entry("airy/continuity_split(z=1)", Airy(ac::continuity_split(&tadpole, 1.0)?), ContractionGenerator));
    Ok(())
}

fn schrodinger_entries(out: &mut Vec<CatalogueEntry>) -> Result<()> {
    use LoadedSpec::Schrodinger;
    use Verdict::SelfAdjoint;
    for (m1, m2, m3) in [(0.0, 0.0, 0.0), (1.0, 2.0, -1.0), (0.3, -0.5, 2.0)] {
        out.push(entry(format!("schrodinger/delta_tadpole(m=[{m1},{m2},{m3}])"), Schrodinger(sc::delta_tadpole(1.0, m1, m2, m3)?), SelfAdjoint));
    }
    let ones = vec![vec![1.0; 3]; 3];
    out.push(entry("schrodinger/delta(N=2,m=1)", Schrodinger(sc::delta_spec(1.0, &ones)?), SelfAdjoint));
    let tadpole = MetricGraph::schrodinger_loop(1.0, 1)?;
    let t1 = MetricGraph::t_shaped(1.0, 1)?;
    for m4 in [0.0, 1.5] {
        out.push(entry(format!("schrodinger/delta_prime(m=[1,0,-1,{m4}])"), Schrodinger(sc::delta_prime(&tadpole, [1.0, 0.0, -1.0, m4])?), SelfAdjoint));
        out.push(entry(format!("schrodinger/t_delta_prime(m=[1,0,1,{m4}])"), Schrodinger(sc::delta_prime(&t1, [1.0, 0.0, 1.0, m4])?), SelfAdjoint));
    }
    for y in [[1.0, 1.0, 0.0], [1.0, 0.0, -1.0], [1.0, 1.0, 2.0]] {
        out.push(entry(format!("schrodinger/subspace(y={y:?})"), Schrodinger(sc::tadpole_subspace(1.0, y)?), SelfAdjoint));
    }
    let zeros = vec![vec![0.0; 3]; 3];
    let mixed = vec![vec![1.0, 0.5, -0.2], vec![0.5, 2.0, 0.0], vec![-0.2, 0.0, -1.0]];
    out.push(entry("schrodinger/t_derivative_continuity(N=2,m=0)", Schrodinger(sc::t_shaped_derivative_continuity(1.0, &zeros)?), SelfAdjoint));
    out.push(entry("schrodinger/t_derivative_continuity(N=2,m=mixed)", Schrodinger(sc::t_shaped_derivative_continuity(1.0, &mixed)?), SelfAdjoint));
    for z in [0.0, 2.0] {
        out.push(entry(format!("schrodinger/dzn(N=1,Z={z})"), Schrodinger(sc::dzn_spec(1.0, 1, z)?), SelfAdjoint));
    }
    Ok(())
}

/// Every worked example, in a fixed order.
pub fn entries() -> Result<Vec<CatalogueEntry>> {
    let mut out = Vec::new();
    airy_entries(&mut out)?;
    schrodinger_entries(&mut out)?;
    Ok(out)
}
