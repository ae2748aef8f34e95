use chainlab_core::transform::{EClassLabel, GroupElement};
use chainlab_core::{Expr, Rational};
use serde::{Deserialize, Serialize};

use crate::Format;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub j: u8,
    pub gamma: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<String>,
    pub k3: String,
    pub k4: String,
}

impl ClassReport {
    pub fn new(l: &EClassLabel) -> Self {
        let r = |q: &Rational| q.to_string();
        ClassReport {
            j: l.j,
            gamma: l.gamma.to_string(),
            p: l.p.as_ref().map(r),
            q: l.q.as_ref().map(r),
            s: l.s.as_ref().map(r),
            k3: r(&l.k3),
            k4: r(&l.k4),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub k1: String,
    pub k2: String,
    pub k3: String,
    pub k4: String,
    pub r0: String,
}

impl WitnessReport {
    pub fn new(g: &GroupElement) -> Self {
        let m = g.mobius();
        let s = |e: &Expr| e.normalize().map_or_else(|_| e.to_string(), |e| e.to_string());
        WitnessReport {
            k1: s(m.k1()),
            k2: s(m.k2()),
            k3: s(m.k3()),
            k4: s(m.k4()),
            r0: g.r0().map_or_else(|| "1".into(), s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub order: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub latex: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residuals: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub class: Option<ClassReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessReport>,
    #[serde(skip)]
    pub(crate) residuals_latex: Vec<String>,
}

impl Report {
    pub fn new(command: &str, order: u32) -> Self {
        Report {
            command: command.into(),
            order,
            equation: None,
            latex: None,
            verdict: None,
            residuals: None,
            class: None,
            witness: None,
            residuals_latex: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.lines(self.equation.as_deref(), self.residuals.clone().unwrap_or_default()),
            Format::Latex => self.lines(self.latex.as_deref(), self.residuals_latex.clone()),
        }
    }

    fn lines(&self, equation: Option<&str>, residuals: Vec<String>) -> String {
        let mut out = String::new();
        if let Some(e) = equation {
            out.push_str(e);
            out.push('\n');
        }
        if let Some(v) = &self.verdict {
            out.push_str(&format!("verdict: {v}\n"));
        }
        for r in residuals {
            out.push_str(&format!("residual: {r}\n"));
        }
        if let Some(c) = &self.class {
            let mut fields = vec![format!("gamma = {}", c.gamma)];
            for (k, v) in [("p", &c.p), ("q", &c.q), ("s", &c.s)] {
                if let Some(v) = v {
                    fields.push(format!("{k} = {v}"));
                }
            }
            fields.push(format!("k3 = {}", c.k3));
            fields.push(format!("k4 = {}", c.k4));
            out.push_str(&format!("class: E{} ({})\n", c.j, fields.join(", ")));
        }
        if let Some(w) = &self.witness {
            out.push_str(&format!(
                "witness: k1 = {}, k2 = {}, k3 = {}, k4 = {}, r0 = {}\n",
                w.k1, w.k2, w.k3, w.k4, w.r0
            ));
        }
        if out.is_empty() {
            out.push_str("0\n");
        }
        out
    }
}

