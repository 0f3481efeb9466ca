use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{integrability_report, IntegrabilityReport};
use crate::error::{Error, Result};
use crate::harness::{
    flux_pairing, osc_defect, strong_conv, AnalysisConfig, CutoffFn, DefectReport, FamilyArtifacts,
    PairingReport, StrongConvReport, REFERENCE_PROXY,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub label: String,
    pub param: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    /// Largest increase of `E_δ` between consecutive records (0 if none).
    pub max_energy_increase: f64,
    /// Largest `|E(t₁) − E(t₀) + ∫D dt|` between consecutive records.
    pub max_balance_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRow {
    pub label: String,
    pub param: f64,
    pub max_res_div_ft: f64,
    pub max_res_piola: f64,
    pub max_res_det_f_linf: f64,
    pub max_moment_drift: f64,
    pub min_tr_tau: f64,
    /// Largest renormalization residual per truncation level.
    pub max_renorm_residual: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityRow {
    pub label: String,
    pub param: f64,
    pub n: usize,
    pub norms: IntegrabilityReport,
}

/// Everything `analyze` produces for one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub sweep: String,
    pub params: Vec<f64>,
    pub reference: String,
    pub reference_note: String,
    /// Failed runs left out of every table.
    pub skipped: Vec<String>,
    pub analysis: AnalysisConfig,
    pub energy: Vec<EnergyRow>,
    pub constraints: Vec<ConstraintRow>,
    pub integrability: Vec<IntegrabilityRow>,
    pub defect: DefectReport,
    pub strong_conv: StrongConvReport,
    pub pairing: Vec<PairingReport>,
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

pub fn report(family: &FamilyArtifacts, analysis: &AnalysisConfig) -> Result<ReportBundle> {
    analysis.validate()?;
    for run in &family.runs {
        if run.records.is_empty() || run.snapshots.is_empty() {
            return Err(Error::MissingArtifacts(format!(
                "run {} has no records or snapshots",
                run.label
            )));
        }
    }
    let (t0, t1) = (analysis.t0, analysis.t1);
    let ref_grid = family.reference_run().snapshots[0].grid().clone();
    let ref_mask = analysis.mask(&ref_grid);

    let energy = family
        .runs
        .iter()
        .map(|run| {
            let r = &run.records;
            let steps = r.windows(2);
            EnergyRow {
                label: run.label.clone(),
                param: run.param,
                energy_initial: r[0].total_energy(),
                energy_final: r[r.len() - 1].total_energy(),
                max_energy_increase: max_of(
                    steps
                        .clone()
                        .map(|w| w[1].total_energy() - w[0].total_energy()),
                ),
                max_balance_residual: max_of(steps.map(|w| {
                    let dt = w[1].t - w[0].t;
                    (w[1].total_energy() - w[0].total_energy()
                        + 0.5 * dt * (w[0].dissipation_rate + w[1].dissipation_rate))
                        .abs()
                })),
            }
        })
        .collect();

    let constraints = family
        .runs
        .iter()
        .map(|run| {
            let r = &run.records;
            ConstraintRow {
                label: run.label.clone(),
                param: run.param,
                max_res_div_ft: max_of(r.iter().map(|x| x.res_div_ft)),
                max_res_piola: max_of(r.iter().map(|x| x.res_piola)),
                max_res_det_f_linf: max_of(r.iter().map(|x| x.res_det_f_linf)),
                max_moment_drift: max_of(r.iter().map(|x| x.moment_drift)),
                min_tr_tau: r.iter().map(|x| x.tr_tau_min).fold(f64::INFINITY, f64::min),
                max_renorm_residual: (0..family.k_list.len())
                    .map(|j| {
                        max_of(
                            r.iter()
                                .map(|x| x.renorm_residual.get(j).copied().unwrap_or(0.0)),
                        )
                    })
                    .collect(),
            }
        })
        .collect();

    let integrability = family
        .runs
        .par_iter()
        .map(|run| {
            let g = run.snapshots[0].grid();
            Ok(IntegrabilityRow {
                label: run.label.clone(),
                param: run.param,
                n: g.n(),
                norms: integrability_report(&run.snapshots, &analysis.mask(g), t0, t1)?,
            })
        })
        .collect::<Result<_>>()?;

    let cutoffs: Vec<CutoffFn> = analysis.cutoffs.iter().map(|&m| CutoffFn::new(m)).collect();
    let pairing = family
        .runs
        .iter()
        .map(|run| {
            flux_pairing(
                run,
                &cutoffs,
                &analysis.mask(run.snapshots[0].grid()),
                t0,
                t1,
            )
        })
        .collect::<Result<_>>()?;

    Ok(ReportBundle {
        sweep: family.sweep.clone(),
        params: family.runs.iter().map(|r| r.param).collect(),
        reference: family.reference_run().label.clone(),
        reference_note: REFERENCE_PROXY.into(),
        skipped: family.skipped.clone(),
        analysis: analysis.clone(),
        energy,
        constraints,
        integrability,
        defect: osc_defect(family, &ref_mask, t0, t1, &analysis.k_list)?,
        strong_conv: strong_conv(family, &ref_mask, t0, t1)?,
        pairing,
    })
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `report.json` and one CSV per table into `dir`.
pub fn write_report(bundle: &ReportBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json_path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(bundle)?;
    text.push('\n');
    fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;

    write_csv(
        &dir.join("report_energy.csv"),
        &[
            "label",
            "param",
            "energy_initial",
            "energy_final",
            "max_energy_increase",
            "max_balance_residual",
        ],
        bundle
            .energy
            .iter()
            .map(|r| {
                vec![
                    r.label.clone(),
                    num(r.param),
                    num(r.energy_initial),
                    num(r.energy_final),
                    num(r.max_energy_increase),
                    num(r.max_balance_residual),
                ]
            })
            .collect(),
    )?;

    let k_cols: Vec<String> = bundle
        .defect
        .k_list
        .iter()
        .map(|k| format!("max_renorm_residual_k{k}"))
        .collect();
    let mut header = vec![
        "label",
        "param",
        "max_res_divFT",
        "max_res_piola",
        "max_res_detF_linf",
        "max_moment_drift",
        "min_tr_tau",
    ];
    let renorm_cols: Vec<String> = (0..bundle
        .constraints
        .first()
        .map_or(0, |c| c.max_renorm_residual.len()))
        .map(|j| {
            k_cols
                .get(j)
                .cloned()
                .unwrap_or_else(|| format!("max_renorm_residual_{j}"))
        })
        .collect();
    header.extend(renorm_cols.iter().map(String::as_str));
    write_csv(
        &dir.join("report_constraints.csv"),
        &header,
        bundle
            .constraints
            .iter()
            .map(|r| {
                let mut v = vec![
                    r.label.clone(),
                    num(r.param),
                    num(r.max_res_div_ft),
                    num(r.max_res_piola),
                    num(r.max_res_det_f_linf),
                    num(r.max_moment_drift),
                    num(r.min_tr_tau),
                ];
                v.extend(r.max_renorm_residual.iter().map(|&x| num(x)));
                v
            })
            .collect(),
    )?;

    write_csv(
        &dir.join("report_integrability.csv"),
        &[
            "label",
            "param",
            "n",
            "norm_F_L3",
            "norm_trtau_L32",
            "norm_Pa_L32",
            "norm_E_L4",
        ],
        bundle
            .integrability
            .iter()
            .map(|r| {
                vec![
                    r.label.clone(),
                    num(r.param),
                    r.n.to_string(),
                    num(r.norms.norm_f_l3),
                    num(r.norms.norm_trtau_l32),
                    num(r.norms.norm_pa_l32),
                    num(r.norms.norm_e_l4),
                ]
            })
            .collect(),
    )?;

    let d = &bundle.defect;
    write_csv(
        &dir.join("report_defect.csv"),
        &["label", "param", "k", "defect"],
        d.rows
            .iter()
            .flat_map(|r| {
                d.k_list
                    .iter()
                    .zip(&r.defect)
                    .map(|(k, v)| vec![r.label.clone(), num(r.param), num(*k), num(*v)])
                    .collect::<Vec<_>>()
            })
            .collect(),
    )?;

    write_csv(
        &dir.join("report_strong_conv.csv"),
        &["label", "param", "l2_error", "l3_modulus_error"],
        bundle
            .strong_conv
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.label.clone(),
                    num(r.param),
                    num(r.l2_error),
                    num(r.l3_modulus_error),
                ]
            })
            .collect(),
    )?;

    write_csv(
        &dir.join("report_pairing.csv"),
        &[
            "label",
            "param",
            "cap",
            "matrix_pairing",
            "scalar_projection",
            "scalar_pressure",
            "identity_residual",
        ],
        bundle
            .pairing
            .iter()
            .flat_map(|p| {
                p.rows
                    .iter()
                    .map(|r| {
                        vec![
                            p.label.clone(),
                            num(p.param),
                            num(r.cap),
                            num(r.matrix_pairing),
                            num(r.scalar_projection),
                            num(r.scalar_pressure),
                            num(r.identity_residual),
                        ]
                    })
                    .collect::<Vec<_>>()
            })
            .collect(),
    )?;
    Ok(())
}
