//! The construction report and its JSON, text and CSV renderings.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::FiveTermReport;
use crate::nilpotent::LayerComparison;
use crate::zlinalg::AbelianGroupInvariants;

/// A value together with the operation that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Computed<T> {
    pub value: T,
    pub op: &'static str,
}

pub(crate) fn computed<T>(value: T, op: &'static str) -> Computed<T> {
    Computed { value, op }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PresentationVariant {
    /// Schreier generators of `R` plus the generators of `F`.
    Big,
    /// The Tietze-reduced presentation.
    Tietze,
}

impl FromStr for PresentationVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "big" => Ok(Self::Big),
            "tietze" => Ok(Self::Tietze),
            _ => Err(Error::Invalid(format!("unknown presentation variant {s:?} (expected big or tietze)"))),
        }
    }
}

impl std::fmt::Display for PresentationVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Big => "big",
            Self::Tietze => "tietze",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::Invalid(format!("unknown format {s:?} (expected json, text or csv)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Inputs {
    pub entry: String,
    pub presentation: String,
    pub variant: PresentationVariant,
    pub class_bound: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypotheses {
    pub balanced: Computed<bool>,
    pub h1: Computed<AbelianGroupInvariants>,
    /// `H₂(Q)`, once the quotient has been enumerated.
    pub h2: Option<Computed<AbelianGroupInvariants>>,
    /// `H₃(Q)` as recorded in the catalog; never computed.
    pub h3_claim: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientSummary {
    pub order: Computed<usize>,
    /// Rank of the free group `R = ker(F → Q)`.
    pub relation_rank: Computed<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberSummary {
    pub generators: usize,
    pub relators: usize,
    pub five_term: Computed<FiveTermReport>,
    /// `H₁` of the materialized presentation, computed independently.
    pub h1_presentation: Computed<AbelianGroupInvariants>,
    pub h2_fiber: Computed<AbelianGroupInvariants>,
    pub h2_direct: Computed<AbelianGroupInvariants>,
    pub induced_surjective: Computed<bool>,
    pub kernel: Computed<AbelianGroupInvariants>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedSummary {
    /// Surviving generators: `aN` is Schreier generator N of `R`, `xN` is
    /// generator N of `F`.
    pub generators: Vec<String>,
    pub relators: usize,
    pub total_length: usize,
    pub budget_exhausted: bool,
    pub op: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct StallingsSummary {
    pub presentation: PresentationVariant,
    pub class: usize,
    pub layers: Vec<LayerComparison>,
    pub op: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct DwyerRow {
    pub k: usize,
    /// `φ_{k+1}`.
    pub phi: AbelianGroupInvariants,
    pub contains_kernel: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DwyerSummary {
    pub presentation: PresentationVariant,
    pub fallback_reason: Option<String>,
    pub identities: String,
    pub table: Vec<DwyerRow>,
    pub op: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionSummary {
    pub presentation: PresentationVariant,
    /// Lower central sections of `G` through the class bound.
    pub sections: Computed<Vec<AbelianGroupInvariants>>,
    pub relator_classes_central: Computed<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaOmega {
    pub invariants: AbelianGroupInvariants,
    pub provenance: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// Taken from the catalog rather than computed.
    Supplied,
    /// Not asserted because the hypotheses do not hold.
    NotAsserted,
}

impl ClaimStatus {
    fn label(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Supplied => "GIVEN",
            Self::NotAsserted => "----",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub id: String,
    pub statement: String,
    pub status: ClaimStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub toolkit_version: &'static str,
    pub inputs: Inputs,
    pub hypotheses: Hypotheses,
    pub violations: Vec<String>,
    pub quotient: Option<QuotientSummary>,
    pub fiber_product: Option<FiberSummary>,
    pub reduced: Option<ReducedSummary>,
    pub stallings: Option<StallingsSummary>,
    pub dwyer: Option<DwyerSummary>,
    pub extension: Option<ExtensionSummary>,
    pub gamma_omega: Option<GammaOmega>,
    pub claims: Vec<Claim>,
    pub verdict: String,
    pub notes: Vec<String>,
    /// Wall-clock time per stage; kept out of the JSON so reruns compare equal.
    #[serde(skip)]
    pub timings: Vec<(&'static str, Duration)>,
}

pub(crate) fn unicode(g: &AbelianGroupInvariants) -> String {
    g.to_string().replace('Z', "ℤ")
}

impl ConstructionReport {
    /// 0 when every asserted claim passes, 2 when the hypotheses fail, 3 when
    /// a claim fails.
    pub fn exit_code(&self) -> i32 {
        if !self.violations.is_empty() {
            2
        } else if self.claims.iter().any(|c| c.status == ClaimStatus::Fail) {
            3
        } else {
            0
        }
    }

    /// Canonical JSON: keys sorted, two-space indent, trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let mut s = serde_json::to_string_pretty(&value)?;
        s.push('\n');
        Ok(s)
    }

    /// The Dwyer table, one row per `k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,phi,free_rank,torsion,contains_kernel\n");
        if let Some(d) = &self.dwyer {
            for row in &d.table {
                let torsion: Vec<String> = row.phi.torsion.iter().map(|t| t.to_string()).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.k,
                    row.phi,
                    row.phi.free_rank,
                    torsion.join(";"),
                    row.contains_kernel
                );
            }
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        Ok(match format {
            ReportFormat::Json => self.to_json()?,
            ReportFormat::Text => self.to_text(),
            ReportFormat::Csv => self.to_csv(),
        })
    }

    pub fn to_text(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut o = String::new();
        let i = &self.inputs;
        let _ = writeln!(o, "Main construction for {} (class bound {}, presentation {})", i.entry, i.class_bound, i.variant);
        let _ = writeln!(o, "Q = {}", i.presentation);
        let h = &self.hypotheses;
        let _ = writeln!(o, "  balanced: {}", yes(h.balanced.value));
        let _ = writeln!(o, "  H₁(Q) = {}", unicode(&h.h1.value));
        if let Some(h2) = &h.h2 {
            let _ = writeln!(o, "  H₂(Q) = {}", unicode(&h2.value));
        }
        match &h.h3_claim {
            Some(c) => {
                let _ = writeln!(o, "  H₃(Q) = {} (catalog value, not computed)", c.replace('Z', "ℤ"));
            }
            None => {
                let _ = writeln!(o, "  H₃(Q): no value recorded");
            }
        }
        for v in &self.violations {
            let _ = writeln!(o, "hypotheses violated: {v}");
        }
        if let Some(q) = &self.quotient {
            let _ = writeln!(o, "|Q| = {}, rank R = {}", q.order.value, q.relation_rank.value);
        }
        if let Some(f) = &self.fiber_product {
            let ft = &f.five_term.value;
            let _ = writeln!(o, "F ×_Q F: {} generators, {} relators", f.generators, f.relators);
            let _ = writeln!(
                o,
                "  H₁(F ×_Q F) = {} (presentation: {}), H₁(F × F) = {}, cokernel {}",
                unicode(&ft.h1_fqf),
                unicode(&f.h1_presentation.value),
                unicode(&ft.h1_ff),
                unicode(&ft.cokernel)
            );
            let _ = writeln!(o, "  five-term sequence exact: {}", yes(ft.is_exact()));
            let _ = writeln!(
                o,
                "  H₂(F ×_Q F) = {} → H₂(F × F) = {}: onto {}, kernel {}",
                unicode(&f.h2_fiber.value),
                unicode(&f.h2_direct.value),
                yes(f.induced_surjective.value),
                unicode(&f.kernel.value)
            );
        }
        if let Some(r) = &self.reduced {
            let _ = writeln!(
                o,
                "Tietze-reduced presentation: generators {} ({} relators, total length {})",
                r.generators.join(", "),
                r.relators,
                r.total_length
            );
        }
        if let Some(s) = &self.stallings {
            let _ = writeln!(o, "Lower central sections along F ×_Q F → F × F ({} presentation):", s.presentation);
            for l in &s.layers {
                let _ = writeln!(
                    o,
                    "  k = {}: {} → {}  {}",
                    l.weight,
                    unicode(&l.source),
                    unicode(&l.target),
                    if l.is_isomorphism() { "isomorphism" } else { "not an isomorphism" }
                );
            }
        }
        if let Some(d) = &self.dwyer {
            let _ = writeln!(o, "Dwyer filtration ({} presentation; identities {}):", d.presentation, d.identities);
            if let Some(r) = &d.fallback_reason {
                let _ = writeln!(o, "  ({r})");
            }
            for row in &d.table {
                let _ = writeln!(
                    o,
                    "  φ_{} = {}  contains the H₂ kernel: {}",
                    row.k + 1,
                    unicode(&row.phi),
                    yes(row.contains_kernel)
                );
            }
        }
        if let Some(e) = &self.extension {
            let secs: Vec<String> = e.sections.value.iter().map(unicode).collect();
            let _ = writeln!(o, "G = free central extension ({} presentation): sections {}", e.presentation, secs.join(", "));
            let _ = writeln!(o, "  relator classes central: {}", yes(e.relator_classes_central.value));
        }
        if let Some(g) = &self.gamma_omega {
            let _ = writeln!(o, "γ_ω(G) ≅ {} ({})", unicode(&g.invariants), g.provenance);
        }
        if !self.claims.is_empty() {
            let _ = writeln!(o, "Claims:");
            for c in &self.claims {
                let _ = writeln!(o, "  [{}] {}", c.status.label(), c.statement);
            }
        }
        let _ = writeln!(o, "Verdict: {}", self.verdict);
        for n in &self.notes {
            let _ = writeln!(o, "Note: {n}");
        }
        if !self.timings.is_empty() {
            let _ = writeln!(o, "Timings:");
            for (stage, t) in &self.timings {
                let _ = writeln!(o, "  {stage}: {:.3}s", t.as_secs_f64());
            }
        }
        o
    }
}
