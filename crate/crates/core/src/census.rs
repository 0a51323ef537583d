//! Orchestration of the whole census: runs the verification sections,
//! assembles a [`CensusReport`] and renders it as JSON or text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bielliptic::{elimination_census, FilterId};
use crate::curves::{good_configuration_search, LatticeChoice};
use crate::error::{Error, Result};
use crate::fpgroup::{
    census_table_check, coset_enumeration, containment_checks, nilgroup_consistency, CensusRow, CosetTable,
    Enumeration, ParabolicSubgroup, Presentation, DEFAULT_MAX_COSETS,
};
use crate::geography::{abelian_profile_pipeline, noether_filter, singularity_solutions, theta_obstruction};
use crate::picard::{derive_invariant_form, parabolic_generator_report};
use crate::quotient::{second_component_choices, solve_case_detailed, SearchScalar, SolveCase};
use crate::registry::{distinctness, example_registry, ExampleRecord};
use crate::smith::AbelianInvariants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Conjunction: any failure fails, otherwise any inconclusive check makes
    /// the whole inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    Abelian,
    Bielliptic,
    Parabolic,
    Examples,
}

impl Section {
    pub const ALL: [Section; 4] = [Section::Abelian, Section::Bielliptic, Section::Parabolic, Section::Examples];

    pub fn name(self) -> &'static str {
        match self {
            Section::Abelian => "abelian",
            Section::Bielliptic => "bielliptic",
            Section::Parabolic => "parabolic",
            Section::Examples => "examples",
        }
    }

    pub fn parse(s: &str) -> Option<Section> {
        Section::ALL.into_iter().find(|x| x.name() == s)
    }
}

/// What to run and with which bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub sections: BTreeSet<Section>,
    pub max_cosets: usize,
    /// Largest `n` with `C² = 2n` on the singularity list.
    pub singularity_bound: i64,
    /// Forces every check whose id starts with this prefix to fail.
    pub fault: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sections: Section::ALL.into_iter().collect(),
            max_cosets: DEFAULT_MAX_COSETS,
            singularity_bound: 6,
            fault: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_cosets == 0 {
            return Err(Error::InvalidConfig("max_cosets must be positive".into()));
        }
        if self.singularity_bound < 1 {
            return Err(Error::InvalidConfig("singularity bound must be positive".into()));
        }
        Ok(())
    }
}

/// One verified claim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub citation: String,
    pub verdict: Verdict,
    pub detail: String,
    pub witness: Value,
    pub counts: BTreeMap<String, u64>,
    /// Wall-clock microseconds; excluded from the digest.
    pub timing_us: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionReport {
    pub section: Section,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub config: RunConfig,
    pub sections: Vec<SectionReport>,
    /// Validated examples (filled by the examples section).
    pub examples: Vec<ExampleRecord>,
    /// Cusp-index rows (filled by the parabolic section).
    pub census_table: Vec<CensusRow>,
    pub verdict: Verdict,
    /// SHA-256 of the report with timings zeroed and this field empty.
    pub digest: String,
}

impl CensusReport {
    pub fn empty(config: RunConfig) -> Self {
        let mut r = CensusReport {
            config,
            sections: Vec::new(),
            examples: Vec::new(),
            census_table: Vec::new(),
            verdict: Verdict::Pass,
            digest: String::new(),
        };
        r.seal();
        r
    }

    pub fn section(&self, s: Section) -> Option<&SectionReport> {
        self.sections.iter().find(|x| x.section == s)
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.sections.iter().flat_map(|s| s.checks.iter())
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks().find(|c| c.id == id)
    }

    /// The report with timings zeroed and no digest.
    fn stable_form(&self) -> CensusReport {
        let mut r = self.clone();
        r.digest.clear();
        for s in &mut r.sections {
            for c in &mut s.checks {
                c.timing_us = 0;
            }
        }
        r
    }

    pub fn compute_digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.stable_form()).expect("report serializes");
        let hash = Sha256::digest(&bytes);
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Recomputes the overall verdict and the digest.
    pub fn seal(&mut self) {
        self.verdict = self.sections.iter().fold(Verdict::Pass, |acc, s| acc.and(s.verdict));
        self.digest = self.compute_digest();
    }

    /// Citation keys used anywhere in the report that the registry does not
    /// know.
    pub fn unresolved_citations(&self) -> Vec<String> {
        let mut keys = BTreeSet::new();
        for c in self.checks() {
            keys.insert(c.citation.clone());
            collect_citations(&c.witness, &mut keys);
        }
        keys.into_iter().filter(|k| resolve_citation(k).is_none()).collect()
    }
}

fn collect_citations(v: &Value, out: &mut BTreeSet<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if k == "citation" {
                    if let Value::String(s) = x {
                        out.insert(s.clone());
                    }
                }
                collect_citations(x, out);
            }
        }
        Value::Array(a) => a.iter().for_each(|x| collect_citations(x, out)),
        _ => {}
    }
}

/// A named argument that a check relies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Citation {
    pub key: &'static str,
    pub summary: &'static str,
}

pub const CITATIONS: &[Citation] = &[
    Citation { key: "good-configuration-classification", summary: "four elliptic curves meeting pairwise once at one point exist only on E_ρ × E_ρ, uniquely up to automorphism" },
    Citation { key: "noether-congruence", summary: "c₁² + c₂ ≡ 0 mod 12 for the minimal model" },
    Citation { key: "theta-obstruction", summary: "an elliptic curve singularity of multiplicity r on an abelian surface needs C² > r(r − 1)" },
    Citation { key: "abelian-boundary-profile", summary: "on a blown-up abelian surface only the profile (−1)⁴ survives" },
    Citation { key: "components-divide-group-order", summary: "the multiplicity r divides the order of the bielliptic group" },
    Citation { key: "albanese-fiber-bound", summary: "the singular curve meets an Albanese fiber at least r times" },
    Citation { key: "rational-fiber-bound", summary: "the singular curve meets a fiber of the other fibration at least r times" },
    Citation { key: "nodal-pair-intersection", summary: "two curves each with a double point at the blown-up point meet four times" },
    Citation { key: "components-equal-fiber-degree", summary: "r divides the degree of the singular curve on each fiber" },
    Citation { key: "bielliptic-elimination", summary: "numerical filters leave Z/3, (Z/3)² and Z/6 classes for the solver" },
    Citation { key: "unit-slope-components", summary: "upstairs components are graphs of unit slopes through torsion offsets" },
    Citation { key: "second-factor-translation", summary: "the group acts by translation on the second factor" },
    Citation { key: "orbit-offsets-torsion", summary: "offsets of the permuted components are torsion points of bounded order" },
    Citation { key: "order-three-translation", summary: "an order-three generator translates by a 3-torsion point" },
    Citation { key: "commuting-translation", summary: "the second generator of (Z/3)² is a commuting translation" },
    Citation { key: "transitive-stabilizer", summary: "the group permutes the components transitively" },
    Citation { key: "order-six-translation", summary: "an order-six generator translates by a 6-torsion point" },
    Citation { key: "w-fibers-disjoint", summary: "distinct fibers over the first factor never meet" },
    Citation { key: "invariant-curve-solver", summary: "exhaustive search for invariant triples of curves meeting in one orbit" },
    Citation { key: "boundary-completion", summary: "the smooth second boundary component is a fiber through the singular point" },
    Citation { key: "invariant-hermitian-form", summary: "the generators preserve a unique Hermitian form of signature (2,1)" },
    Citation { key: "picard-relators", summary: "(PQ⁻¹)⁶ and P³Q⁻² are scalar in the matrix representation" },
    Citation { key: "rotation-free-parabolics", summary: "every listed cusp generator is unipotent up to a unit" },
    Citation { key: "parabolic-subgroup-index", summary: "the subscript of each cusp subgroup is its index in Δ" },
    Citation { key: "nil-cusp-self-intersection", summary: "a rotation-free N_k cusp compactifies to an elliptic curve of self-intersection −k" },
    Citation { key: "abelianization", summary: "abelian invariants of N₁, N₃, Δ and the (2,3,6) triangle group" },
    Citation { key: "index-multiplicativity", summary: "nested cusp subgroups have multiplicative indices" },
    Citation { key: "cusp-index-sum", summary: "cusp indices of each example add up to the covering degree 72" },
    Citation { key: "five-compactifications", summary: "exactly five smooth toroidal compactifications with Euler number one" },
    Citation { key: "example-distinctness", summary: "the five examples are pairwise distinct by H₁ or by Num automorphisms" },
];

pub fn resolve_citation(key: &str) -> Option<&'static Citation> {
    CITATIONS.iter().find(|c| c.key == key)
}

struct Outcome {
    verdict: Verdict,
    detail: String,
    witness: Value,
    counts: BTreeMap<String, u64>,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>, witness: Value) -> Self {
        Outcome { verdict: Verdict::from_bool(ok), detail: detail.into(), witness, counts: BTreeMap::new() }
    }

    fn count(mut self, k: &str, v: u64) -> Self {
        self.counts.insert(k.into(), v);
        self
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report data serializes")
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    checks: Vec<Check>,
}

impl Runner<'_> {
    fn run(&mut self, id: &str, citation: &str, f: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}"), Value::Null));
        let timing_us = start.elapsed().as_micros() as u64;
        let mut check = Check {
            id: id.into(),
            citation: citation.into(),
            verdict: outcome.verdict,
            detail: outcome.detail,
            witness: outcome.witness,
            counts: outcome.counts,
            timing_us,
        };
        if self.cfg.fault.as_deref().is_some_and(|p| id.starts_with(p)) {
            check.verdict = Verdict::Fail;
            check.detail = format!("fault injected; {}", check.detail);
        }
        self.checks.push(check);
    }

    fn finish(self, section: Section) -> SectionReport {
        let verdict = self.checks.iter().fold(Verdict::Pass, |acc, c| acc.and(c.verdict));
        SectionReport { section, verdict, checks: self.checks }
    }
}

fn abelian_section(cfg: &RunConfig) -> SectionReport {
    let mut r = Runner { cfg, checks: Vec::new() };
    for choice in LatticeChoice::ALL {
        r.run(&format!("abelian.good-config.{}", choice.name()), "good-configuration-classification", || {
            let report = good_configuration_search::<SearchScalar>(choice)?;
            let expected = usize::from(choice == LatticeChoice::Eisenstein);
            let mut ok = report.classes.len() == expected;
            if choice == LatticeChoice::Eisenstein {
                ok &= report.classes.first().map(|c| c.representative.curves.clone())
                    == Some(vec!["w = 0".into(), "z = 0".into(), "w = z".into(), "w = (1 + ρ)z".into()]);
            }
            Ok(Outcome::new(ok, format!("{} class(es) on the {} lattice", report.classes.len(), choice.name()), to_value(&report))
                .count("pairs_examined", report.pairs_examined as u64)
                .count("classes", report.classes.len() as u64))
        });
    }
    r.run("abelian.noether", "noether-congruence", || {
        let rows: Vec<Value> =
            [(1, 1), (2, 1)].iter().map(|(a, b)| json!({"c1_sq": a, "c2": b, "passes": noether_filter(*a, *b)})).collect();
        let ok = [(1, 1), (2, 1)].iter().all(|(a, b)| !noether_filter(*a, *b));
        Ok(Outcome::new(ok, "general-type minimal models fail the congruence", Value::Array(rows)))
    });
    let bound = cfg.singularity_bound;
    r.run("abelian.singularities", "theta-obstruction", move || {
        let list = singularity_solutions(bound);
        let pairs: Vec<(i64, i64)> = list.iter().map(|d| (d.n, d.r)).collect();
        let expected_list = bound != 6 || pairs == vec![(1, 2), (3, 3), (6, 4)];
        let all_forbidden = list.iter().all(|d| d.c_selfint() == d.r * (d.r - 1) && theta_obstruction(d.c_selfint(), d.r));
        Ok(Outcome::new(expected_list && all_forbidden, format!("(n, r) = {pairs:?}"), to_value(&list)).count("data", list.len() as u64))
    });
    r.run("abelian.profiles", "abelian-boundary-profile", || {
        let verdicts = abelian_profile_pipeline();
        let survivors: Vec<&Vec<i64>> = verdicts.iter().filter(|v| v.survives).map(|v| &v.profile).collect();
        let ok = survivors == vec![&vec![-1, -1, -1, -1]];
        Ok(Outcome::new(ok, format!("surviving profiles {survivors:?}"), to_value(&verdicts))
            .count("profiles", verdicts.len() as u64))
    });
    r.finish(Section::Abelian)
}

fn bielliptic_section(cfg: &RunConfig) -> SectionReport {
    let mut r = Runner { cfg, checks: Vec::new() };
    r.run("bielliptic.elimination", "bielliptic-elimination", || {
        let census = elimination_census();
        let mut got: Vec<(i64, i64, i64, i64)> = census.survivors.iter().map(|c| (c.bdf.s, c.bdf.t, c.k1, c.k2)).collect();
        got.sort_unstable();
        let expected = vec![(3, 1, 3, 1), (3, 3, 1, 3), (3, 3, 3, 1), (6, 1, 3, 1)];
        let mut handed: Vec<(i64, i64, i64, i64)> =
            SolveCase::ALL.iter().map(|c| (c.bdf().s, c.bdf().t, c.class().k1, c.class().k2)).collect();
        handed.sort_unstable();
        handed.dedup();
        let ok = got == expected && handed == expected;
        let by_filter = FilterId::ALL
            .iter()
            .map(|f| {
                let n = census.rows.iter().flat_map(|row| &row.verdicts).filter(|v| v.deciding == Some(*f)).count();
                (f.citation().to_string(), n as u64)
            })
            .collect::<BTreeMap<_, _>>();
        let survivors: Vec<String> = census.survivors.iter().map(|c| format!("{}: {c}", c.bdf.group_name())).collect();
        let candidates = census.rows.iter().map(|row| row.verdicts.len()).sum::<usize>() as u64;
        let mut out = Outcome::new(ok, format!("numeric survivors {survivors:?}"), json!({"survivors": survivors, "rows": to_value(&census.rows)}))
            .count("candidates", candidates);
        for (k, v) in by_filter {
            out = out.count(&format!("eliminated_by.{k}"), v);
        }
        Ok(out)
    });
    for case in SolveCase::ALL {
        let solved = solve_case_detailed(case);
        let survives = matches!(case, SolveCase::Z3AB | SolveCase::Z3Z3A3B);
        let solved_ref = solved.as_ref().map_err(|e| e.clone());
        r.run(&format!("bielliptic.solve.{}", case.name()), "invariant-curve-solver", || {
            let sol = solved_ref?;
            let res = &sol.result;
            let mut ok = res.certificate.complete();
            if survives {
                ok &= res.classes.len() == 1;
            } else {
                ok &= res.refuted();
            }
            if case == SolveCase::Z3Z3A3B {
                ok &= res.psi_orbit.len() == 6;
            }
            let detail = if res.refuted() {
                format!("no solutions among {} tuples", res.certificate.tuples_examined)
            } else {
                format!("{} solution(s) in {} class(es)", res.distinct_solutions, res.classes.len())
            };
            Ok(Outcome::new(ok, detail, to_value(res))
                .count("predicted_tuples", res.certificate.predicted_tuples)
                .count("tuples_examined", res.certificate.tuples_examined)
                .count("accepted_tuples", res.certificate.accepted_tuples)
                .count("invariance_checks", res.certificate.invariance_checks))
        });
        if survives {
            r.run(&format!("bielliptic.completions.{}", case.name()), "boundary-completion", || {
                let sol = solved?;
                let rep = sol.representative(0).ok_or_else(|| Error::InvalidConfig("no representative".into()))?;
                let choices = second_component_choices(case, rep)?;
                let names: Vec<&str> = choices.iter().map(|c| c.class_name.as_str()).collect();
                Ok(Outcome::new(choices.len() == 2, format!("second components {names:?}"), to_value(&choices))
                    .count("completions", choices.len() as u64))
            });
        }
    }
    r.finish(Section::Bielliptic)
}

/// Enumerates every cusp subgroup with the configured bound.
fn enumerate_all(max_cosets: usize) -> Result<BTreeMap<ParabolicSubgroup, Enumeration>> {
    let delta = Presentation::delta();
    ParabolicSubgroup::ALL.iter().map(|s| Ok((*s, coset_enumeration(&delta, &s.spec(), max_cosets)?))).collect()
}

fn parabolic_section(cfg: &RunConfig) -> (SectionReport, Vec<CensusRow>) {
    let mut r = Runner { cfg, checks: Vec::new() };
    r.run("parabolic.form", "invariant-hermitian-form", || {
        let f = derive_invariant_form()?;
        let ok = f.solution_dimension == 1 && f.certificate.signature == (2, 1) && f.certificate.char_poly_signature == (2, 1);
        Ok(Outcome::new(ok, format!("signature {:?}", f.certificate.signature), json!({"form": f.form.j.rows_strings(), "certificate": to_value(&f.certificate)}))
            .count("solution_dimension", f.solution_dimension as u64))
    });
    let report = parabolic_generator_report();
    let rep = report.as_ref().map_err(|e| e.clone());
    r.run("parabolic.relators", "picard-relators", || {
        let rep = rep.clone()?;
        let ok = rep.relators.iter().all(|x| x.unit);
        Ok(Outcome::new(ok, "relators evaluate to unit scalars", to_value(&rep.relators)))
    });
    for s in ParabolicSubgroup::ALL {
        r.run(&format!("parabolic.unipotent.{}", s.key()), "rotation-free-parabolics", || {
            let rep = rep.clone()?;
            let sub = rep
                .subgroups
                .iter()
                .find(|x| x.subgroup == s)
                .ok_or_else(|| Error::InvalidConfig("subgroup missing from the report".into()))?;
            Ok(Outcome::new(sub.holds(), format!("{} generators unipotent up to a unit", s.label()), to_value(sub))
                .count("generators", sub.generators.len() as u64))
        });
    }
    let enums = enumerate_all(cfg.max_cosets);
    let mut tables: BTreeMap<ParabolicSubgroup, CosetTable> = BTreeMap::new();
    let mut indices: BTreeMap<ParabolicSubgroup, usize> = BTreeMap::new();
    for s in ParabolicSubgroup::ALL {
        let id = format!("parabolic.index.{}", s.key());
        let e = enums.as_ref().map(|m| m[&s].clone()).map_err(|e| e.clone());
        if let Ok(Enumeration::Complete(t)) = &e {
            tables.insert(s, t.clone());
            indices.insert(s, t.index());
        }
        r.run(&id, "parabolic-subgroup-index", || match e? {
            Enumeration::Complete(t) => Ok(Outcome::new(
                t.index() == s.nominal_index(),
                format!("[Δ : {}] = {}", s.label(), t.index()),
                json!({"subgroup": s, "index": t.index(), "expected": s.nominal_index()}),
            )
            .count("index", t.index() as u64)
            .count("cosets_defined", t.cosets_defined() as u64)),
            Enumeration::Inconclusive { defined, bound } => Ok(Outcome {
                verdict: Verdict::Inconclusive,
                detail: format!("coset bound {bound} reached for {}", s.label()),
                witness: json!({"subgroup": s, "defined": defined, "bound": bound}),
                counts: BTreeMap::from([("cosets_defined".to_string(), defined as u64)]),
            }),
        });
        r.run(&format!("parabolic.nil.{}", s.key()), "nil-cusp-self-intersection", || match tables.get(&s) {
            Some(t) => {
                let n = nilgroup_consistency(s.nil_k(), s, t)?;
                Ok(Outcome::new(
                    n.consistent,
                    format!("{} ~ N_{}: H₁ = {}, cusp self-intersection {}", s.label(), n.k, n.subgroup_abelianization, n.cusp_self_intersection),
                    to_value(&n),
                ))
            }
            None => Ok(Outcome { verdict: Verdict::Inconclusive, detail: "no coset table".into(), witness: Value::Null, counts: BTreeMap::new() }),
        });
    }
    r.run("parabolic.abelianization", "abelianization", || {
        let cases = [
            ("N_1", Presentation::nil(1), AbelianInvariants::free(2)),
            ("N_3", Presentation::nil(3), AbelianInvariants::new(2, vec![3])),
            ("Δ", Presentation::delta(), AbelianInvariants::new(0, vec![6])),
            ("Δ(2,3,6)", Presentation::triangle_236(), AbelianInvariants::new(0, vec![6])),
        ];
        let mut ok = true;
        let mut rows = Vec::new();
        for (name, p, expected) in cases {
            let got = p.abelian_invariants()?;
            ok &= got == expected;
            rows.push(json!({"group": name, "presentation": p.to_string(), "invariants": got.to_string()}));
        }
        Ok(Outcome::new(ok, "abelian invariants from the relation matrices", Value::Array(rows)))
    });
    let all_tables = tables.len() == ParabolicSubgroup::ALL.len();
    r.run("parabolic.containment", "index-multiplicativity", || {
        if !all_tables {
            return Ok(Outcome { verdict: Verdict::Inconclusive, detail: "missing coset tables".into(), witness: Value::Null, counts: BTreeMap::new() });
        }
        let rows = containment_checks(&tables);
        let ok = !rows.is_empty() && rows.iter().all(|c| c.multiplicative);
        Ok(Outcome::new(ok, format!("{} containments, all with uniform fibres", rows.len()), to_value(&rows))
            .count("containments", rows.len() as u64))
    });
    let mut table_rows = Vec::new();
    r.run("parabolic.census-table", "cusp-index-sum", || {
        if !all_tables {
            return Ok(Outcome { verdict: Verdict::Inconclusive, detail: "missing coset indices".into(), witness: Value::Null, counts: BTreeMap::new() });
        }
        let records = example_registry()?;
        let rows = census_table_check(&indices, &records)?;
        let ok = rows.len() == 5 && rows.iter().all(|x| x.holds());
        table_rows = rows.clone();
        let sums: Vec<usize> = rows.iter().map(|x| x.index_sum).collect();
        Ok(Outcome::new(ok, format!("index sums {sums:?}"), to_value(&rows)).count("rows", rows.len() as u64))
    });
    (r.finish(Section::Parabolic), table_rows)
}

fn examples_section(cfg: &RunConfig) -> (SectionReport, Vec<ExampleRecord>) {
    let mut r = Runner { cfg, checks: Vec::new() };
    let records = example_registry();
    let recs = records.as_ref().map_err(|e| e.clone());
    r.run("examples.registry", "five-compactifications", || {
        let recs = recs.clone()?;
        let ok = recs.len() == 5 && recs.iter().all(|x| x.saturated && x.log_chern == (3, 1));
        let h1: Vec<String> = recs.iter().map(|x| x.h1.to_string()).collect();
        let h1_ok = h1 == ["Z^4", "Z^2 + Z/3", "Z^2 + Z/3", "Z^2", "Z^2"];
        Ok(Outcome::new(ok && h1_ok, format!("{} saturated examples, H₁ = {h1:?}", recs.len()), to_value(&recs))
            .count("examples", recs.len() as u64))
    });
    r.run("examples.distinctness", "example-distinctness", || {
        let recs = recs.clone()?;
        let d = distinctness(recs)?;
        let n = recs.len();
        Ok(Outcome::new(d.len() == n * (n - 1) / 2, format!("{} pairs told apart", d.len()), to_value(&d)).count("pairs", d.len() as u64))
    });
    (r.finish(Section::Examples), records.unwrap_or_default())
}

/// Runs the configured sections in order.
pub fn run_verification(cfg: &RunConfig) -> Result<CensusReport> {
    cfg.validate()?;
    let mut report = CensusReport::empty(cfg.clone());
    for s in &cfg.sections {
        match s {
            Section::Abelian => report.sections.push(abelian_section(cfg)),
            Section::Bielliptic => report.sections.push(bielliptic_section(cfg)),
            Section::Parabolic => {
                let (sec, rows) = parabolic_section(cfg);
                report.sections.push(sec);
                report.census_table = rows;
            }
            Section::Examples => {
                let (sec, recs) = examples_section(cfg);
                report.sections.push(sec);
                report.examples = recs;
            }
        }
    }
    report.seal();
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

/// `0` pass, `1` fail, `2` inconclusive.
pub fn exit_code(r: &CensusReport) -> i32 {
    match r.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    }
}

pub fn emit_report(r: &CensusReport, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut v = serde_json::to_vec_pretty(r).map_err(|e| Error::Unsupported(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
        OutputFormat::Text => Ok(render_text(r).into_bytes()),
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<CensusReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::InvalidConfig(format!("not a census report: {e}")))
}

fn example_name(r: &ExampleRecord) -> String {
    match r.minimal {
        crate::geography::MinimalType::Abelian => "abelian (E_ρ × E_ρ)".into(),
        crate::geography::MinimalType::Bielliptic { s, t } if t == 1 => format!("Z/{s} bielliptic"),
        crate::geography::MinimalType::Bielliptic { s, t } => format!("Z/{s} x Z/{t} bielliptic"),
        _ => r.surface.clone(),
    }
}

fn render_text(r: &CensusReport) -> String {
    let mut out = String::new();
    for s in &r.sections {
        out.push_str(&format!("[{}] {}\n", s.section.name(), s.verdict));
        for c in &s.checks {
            out.push_str(&format!("  {:<13} {:<38} {}\n", c.verdict.to_string(), c.id, c.detail));
        }
    }
    if !r.census_table.is_empty() {
        out.push_str("\ncompactification          parabolic subgroups                 sum  profile\n");
        for row in &r.census_table {
            let name = r
                .examples
                .iter()
                .find(|e| e.id == row.example)
                .map(example_name)
                .unwrap_or_else(|| format!("example {}", row.example));
            let groups: Vec<String> = row
                .cusps
                .iter()
                .map(|(s, m)| if *m == 1 { s.label().to_string() } else { format!("{} x{}", s.label(), m) })
                .collect();
            let profile: Vec<String> = row.boundary_profile.iter().map(|d| d.to_string()).collect();
            out.push_str(&format!(
                "#{} {:<22} {:<35} {:>3}  ({})\n",
                row.example,
                name,
                groups.join(", "),
                row.index_sum,
                profile.join(", ")
            ));
        }
    }
    if !r.examples.is_empty() {
        out.push_str("\nexample  minimal model            H1          boundary\n");
        for e in &r.examples {
            let boundary: Vec<String> = e.boundary.iter().map(|b| format!("{}²={}", b.name, b.strict_transform)).collect();
            out.push_str(&format!("#{:<7} {:<24} {:<11} {}\n", e.id, example_name(e), e.h1.to_string(), boundary.join(", ")));
        }
    }
    out.push_str(&format!("\nverdict: {}\ndigest: {}\n", r.verdict, r.digest));
    out
}
