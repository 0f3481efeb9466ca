use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    constraint_residuals, effective_flux, energy_report, perturbation_report, renorm_residual,
};
use crate::dynamics::{ModelParams, State};
use crate::error::Result;
use crate::tensor::Mat2;

/// One time-stamped row of measured functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub kinetic: f64,
    pub elastic: f64,
    pub delta_elastic: f64,
    pub dissipation_rate: f64,
    pub dissipation_mu: f64,
    pub dissipation_eta: f64,
    pub dissipation_delta: f64,
    pub delta_work_defect: f64,
    pub res_div_ft: f64,
    pub res_piola: f64,
    pub res_det_f: f64,
    pub res_det_f_linf: f64,
    pub moment_drift: f64,
    pub tr_tau_min: f64,
    pub flux_g: f64,
    pub flux_g1: f64,
    pub flux_g1_tilde: f64,
    pub flux_g1_hat: f64,
    pub flux_g2: f64,
    pub flux_g3: f64,
    pub perturb_linf_e11_m_e22: f64,
    pub perturb_linf_e12_p_e21: f64,
    /// Renormalized-transport residual over the interval ending at `t`, one
    /// entry per truncation level (0 on the first row, which has no interval).
    pub renorm_residual: Vec<f64>,
}

/// Column names, in order, before the per-`k` renormalization columns.
pub const RECORD_COLUMNS: [&str; 23] = [
    "t",
    "kinetic",
    "elastic",
    "delta_elastic",
    "dissipation_rate",
    "dissipation_mu",
    "dissipation_eta",
    "dissipation_delta",
    "delta_work_defect",
    "res_divFT",
    "res_piola",
    "res_detF",
    "res_detF_linf",
    "moment_drift",
    "tr_tau_min",
    "flux_G",
    "flux_G1",
    "flux_G1_tilde",
    "flux_G1_hat",
    "flux_G2",
    "flux_G3",
    "perturb_linf_E11mE22",
    "perturb_linf_E12pE21",
];

pub fn renorm_column(k: f64) -> String {
    format!("renorm_residual_k{k}")
}

impl DiagnosticsRecord {
    /// Measures `state`; `prev` (if any) is the previously recorded state.
    pub fn measure(
        state: &State,
        params: &ModelParams,
        initial_moment: &Mat2,
        prev: Option<&State>,
        k_list: &[f64],
    ) -> Result<Self> {
        let e = energy_report(state, params);
        let c = constraint_residuals(state, initial_moment);
        let fl = effective_flux(state);
        let pr = perturbation_report(state);
        let renorm = match prev {
            Some(p) => k_list
                .iter()
                .map(|&k| renorm_residual(p, state, k))
                .collect::<Result<Vec<_>>>()?,
            None => vec![0.0; k_list.len()],
        };
        Ok(Self {
            t: state.t,
            kinetic: e.kinetic,
            elastic: e.elastic,
            delta_elastic: e.delta_elastic,
            dissipation_rate: e.dissipation_rate,
            dissipation_mu: e.dissipation_mu,
            dissipation_eta: e.dissipation_eta,
            dissipation_delta: e.dissipation_delta,
            delta_work_defect: e.delta_work_defect,
            res_div_ft: c.res_div_ft,
            res_piola: c.res_piola,
            res_det_f: c.res_det_l2,
            res_det_f_linf: c.res_det_linf,
            moment_drift: c.moment_drift,
            tr_tau_min: c.tr_tau_min,
            flux_g: fl.g.l2_norm(),
            flux_g1: fl.g1.l2_norm(),
            flux_g1_tilde: fl.g1_tilde.l2_norm(),
            flux_g1_hat: fl.g1_hat.l2_norm(),
            flux_g2: fl.g2.l2_norm(),
            flux_g3: fl.g3.l2_norm(),
            perturb_linf_e11_m_e22: pr.linf_e11_m_e22,
            perturb_linf_e12_p_e21: pr.linf_e12_p_e21,
            renorm_residual: renorm,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.t,
            self.kinetic,
            self.elastic,
            self.delta_elastic,
            self.dissipation_rate,
            self.dissipation_mu,
            self.dissipation_eta,
            self.dissipation_delta,
            self.delta_work_defect,
            self.res_div_ft,
            self.res_piola,
            self.res_det_f,
            self.res_det_f_linf,
            self.moment_drift,
            self.tr_tau_min,
            self.flux_g,
            self.flux_g1,
            self.flux_g1_tilde,
            self.flux_g1_hat,
            self.flux_g2,
            self.flux_g3,
            self.perturb_linf_e11_m_e22,
            self.perturb_linf_e12_p_e21,
        ];
        v.extend_from_slice(&self.renorm_residual);
        v
    }

    /// Inverse of [`values`](Self::values); `None` when the row is shorter
    /// than the fixed columns.
    pub fn from_values(v: &[f64]) -> Option<Self> {
        if v.len() < RECORD_COLUMNS.len() {
            return None;
        }
        Some(Self {
            t: v[0],
            kinetic: v[1],
            elastic: v[2],
            delta_elastic: v[3],
            dissipation_rate: v[4],
            dissipation_mu: v[5],
            dissipation_eta: v[6],
            dissipation_delta: v[7],
            delta_work_defect: v[8],
            res_div_ft: v[9],
            res_piola: v[10],
            res_det_f: v[11],
            res_det_f_linf: v[12],
            moment_drift: v[13],
            tr_tau_min: v[14],
            flux_g: v[15],
            flux_g1: v[16],
            flux_g1_tilde: v[17],
            flux_g1_hat: v[18],
            flux_g2: v[19],
            flux_g3: v[20],
            perturb_linf_e11_m_e22: v[21],
            perturb_linf_e12_p_e21: v[22],
            renorm_residual: v[RECORD_COLUMNS.len()..].to_vec(),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    /// `E_δ`.
    pub fn total_energy(&self) -> f64 {
        self.kinetic + self.elastic + self.delta_elastic
    }
}

pub fn csv_header(k_list: &[f64]) -> Vec<String> {
    RECORD_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(k_list.iter().map(|&k| renorm_column(k)))
        .collect()
}

/// Writes the records as CSV with 17 significant digits.
pub fn write_records_csv<W: Write>(
    out: W,
    records: &[DiagnosticsRecord],
    k_list: &[f64],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(k_list))?;
    for r in records {
        w.write_record(r.values().iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush().map_err(|e| crate::error::Error::io("<csv>", e))?;
    Ok(())
}

/// Parses a CSV written by [`write_records_csv`]; returns `(header, rows)`.
pub fn read_records_csv<R: std::io::Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| crate::error::Error::Config(format!("bad CSV value {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
