use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::assembly::{
    assemble_coupling_explicit, assemble_rhs, BlockSystem, Coupling, CouplingMode, CouplingOperator, DiagonalAssembler,
};
use crate::bloch::{alpha_grid, BlochField, BlochGrid};
use crate::dtn::DtnConfig;
use crate::error::{Error, Result};
use crate::geometry::{CoefficientField, FlatteningMap};
use crate::mesh::{build_periodic_mesh, PeriodicCellMesh};
use crate::postprocess::{reconstruct_on_gamma_h, relative_l2_error, trace_samples, ConvergenceRow, ConvergenceTable};
use crate::solver::{block_ilu0, block_lu, gmres_solve, GmresOutcome, Preconditioner, PreconditionerKind};
use crate::source::{bloch_dirichlet_data, exact_reference_on_gamma_h, DirichletTable, PointSource};

/// Wall-clock seconds per pipeline stage.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Timings {
    pub setup: f64,
    pub data: f64,
    pub assembly: f64,
    pub solve: f64,
    pub postprocess: f64,
    pub total: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub err: f64,
    pub iterations: usize,
    pub residual: f64,
    pub true_residual: f64,
    /// `None` when the surface is flat at h₀ and no coupling was built.
    pub coupling: Option<CouplingMode>,
    pub tail_ratio: f64,
    pub timings: Timings,
    pub row: ConvergenceRow,
}

/// Geometry, mesh, grid and source of one configuration.
#[derive(Clone, Debug)]
pub struct Problem {
    pub config: ExperimentConfig,
    pub field: CoefficientField,
    pub mesh: PeriodicCellMesh,
    pub grid: BlochGrid,
    pub source: PointSource,
    pub dtn: DtnConfig,
}

impl Problem {
    pub fn setup(config: &ExperimentConfig) -> Result<Self> {
        config.validate().map_err(|e| e.at("config"))?;
        let profile = config.surface.profile().map_err(|e| e.at("geometry"))?;
        let map = FlatteningMap::new(profile, config.h0, config.big_h0, config.top).map_err(|e| e.at("geometry"))?;
        let mesh = build_periodic_mesh(config.lambda, config.h0, config.top, config.h).map_err(|e| e.at("mesh"))?;
        let grid = alpha_grid(config.n, config.lambda).map_err(|e| e.at("bloch"))?;
        let source = PointSource::new(config.source, config.k, config.h0).map_err(|e| e.at("source"))?;
        let j_dtn = config.j_dtn.unwrap_or_else(|| DtnConfig::default_modes(config.k, &mesh));
        let dtn = DtnConfig::new(config.k, config.lambda, j_dtn).map_err(|e| e.at("dtn"))?;
        Ok(Self { config: config.clone(), field: CoefficientField::new(map), mesh, grid, source, dtn })
    }

    pub fn dirichlet_data(&self) -> Result<DirichletTable> {
        bloch_dirichlet_data(&self.grid, &self.mesh, self.field.map().profile(), &self.source, self.config.n_bc).map_err(|e| e.at("data"))
    }

    /// Block system for the given boundary data and coupling mode.
    pub fn assemble(&self, table: &DirichletTable, mode: CouplingMode) -> Result<BlockSystem> {
        let assembler = DiagonalAssembler::new(&self.mesh, &self.dtn);
        let diag: Vec<_> = (0..self.grid.n()).into_par_iter().map(|j| assembler.block(&self.grid, j)).collect();
        let coupling = if self.field.is_zero() {
            Coupling::Zero
        } else {
            match mode.resolve(self.grid.n(), self.mesh.m_prime()) {
                CouplingMode::Explicit => Coupling::Explicit(
                    assemble_coupling_explicit(&self.mesh, &self.grid, &self.field, self.config.k).map_err(|e| e.at("assembly"))?,
                ),
                _ => Coupling::MatrixFree(CouplingOperator::new(&self.mesh, &self.grid, &self.field, self.config.k)),
            }
        };
        let rhs = assemble_rhs(table, &self.mesh).map_err(|e| e.at("assembly"))?;
        BlockSystem::new(diag, coupling, rhs, self.mesh.m()).map_err(|e| e.at("assembly"))
    }

    /// Block-ILU(0) preconditioned GMRES on the assembled system.
    pub fn solve(&self, system: &BlockSystem) -> Result<GmresOutcome> {
        let pre: Box<dyn Preconditioner> = match self.config.solver.preconditioner {
            PreconditionerKind::Ilu0 => Box::new(block_ilu0(system.diag_blocks()).map_err(|e| e.at("solve"))?),
            PreconditionerKind::BlockLu => Box::new(block_lu(system.diag_blocks()).map_err(|e| e.at("solve"))?),
        };
        gmres_solve(system, Some(pre.as_ref()), system.rhs(), &self.config.solver).map_err(|e| e.at("solve"))
    }

    /// Numeric and exact traces on Γ_H with their Simpson weights.
    pub fn traces(&self, field: &BlochField) -> Result<(Vec<Complex64>, Vec<Complex64>, Vec<f64>)> {
        let (xs, weights) = trace_samples(&self.mesh);
        let numeric = reconstruct_on_gamma_h(field, &self.grid, &self.mesh, &xs);
        let exact = xs
            .iter()
            .map(|&x| exact_reference_on_gamma_h(x, &self.source, self.config.top))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.at("postprocess"))?;
        Ok((numeric, exact, weights))
    }

    /// Relative L² error of the reconstructed trace on Γ_H.
    pub fn error(&self, field: &BlochField) -> Result<f64> {
        let (numeric, exact, weights) = self.traces(field)?;
        relative_l2_error(&numeric, &exact, &weights).map_err(|e| e.at("postprocess"))
    }
}

/// Rough memory footprint of a run in bytes.
pub fn estimate_memory_bytes(config: &ExperimentConfig) -> usize {
    let nx = (config.lambda / config.h).ceil() as usize;
    let ny = ((config.top - config.h0) / config.h).ceil() as usize;
    let mp = nx * (ny + 1);
    let n = config.n;
    let block_nnz = 7 * mp + nx * nx;
    let krylov = (config.solver.restart + 4) * n * mp * 16;
    let blocks = 2 * n * block_nnz * 24;
    let explicit = match config.coupling.resolve(n, mp) {
        CouplingMode::Explicit => n * n * 7 * mp * 16,
        _ => 0,
    };
    // sparse LU fill is about nx entries per unknown on this mesh
    let lu = match config.solver.preconditioner {
        PreconditionerKind::BlockLu => n * mp * nx * 24,
        PreconditionerKind::Ilu0 => 0,
    };
    krylov + blocks + explicit + lu
}

/// Runs the full pipeline for one configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    let problem = Problem::setup(config)?;
    let t_setup = t0.elapsed().as_secs_f64();

    let t = Instant::now();
    let table = problem.dirichlet_data()?;
    let t_data = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let system = problem.assemble(&table, config.coupling)?;
    let t_assembly = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let outcome = problem.solve(&system)?.into_result().map_err(|e| e.at("solve"))?;
    let t_solve = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let field = BlochField::from_vec(config.n, problem.mesh.m_prime(), outcome.x.clone())?;
    let err = problem.error(&field)?;
    let t_post = t.elapsed().as_secs_f64();
    let total = t0.elapsed().as_secs_f64();

    let coupling = match system.coupling() {
        Coupling::Zero => None,
        Coupling::Explicit(_) => Some(CouplingMode::Explicit),
        Coupling::MatrixFree(_) => Some(CouplingMode::MatrixFree),
    };
    log::info!(
        "N = {}, h = {}: err = {err:.3e}, {} iterations, {total:.1} s",
        config.n,
        config.h,
        outcome.iterations
    );
    Ok(ExperimentReport {
        err,
        iterations: outcome.iterations,
        residual: outcome.residual,
        true_residual: outcome.true_residual,
        coupling,
        tail_ratio: table.tail_ratio(),
        timings: Timings { setup: t_setup, data: t_data, assembly: t_assembly, solve: t_solve, postprocess: t_post, total },
        row: ConvergenceRow { n: config.n, h: config.h, err, iterations: outcome.iterations, seconds: total },
    })
}

/// Result of one (h, N) cell of a sweep.
#[derive(Debug)]
pub struct SweepCell {
    pub h: f64,
    pub n: usize,
    pub result: Result<ExperimentReport>,
}

/// Runs every (h, N) pair in order; failures and cells over the memory
/// budget are recorded without aborting the sweep.
pub fn sweep(base: &ExperimentConfig, hs: &[f64], ns: &[usize]) -> (Vec<SweepCell>, ConvergenceTable) {
    let mut cells = Vec::new();
    let mut table = ConvergenceTable::new();
    for &n in ns {
        for &h in hs {
            let mut cfg = base.clone();
            cfg.h = h;
            cfg.n = n;
            let need = estimate_memory_bytes(&cfg);
            let budget = cfg.memory_budget_mb << 20;
            let result = if need > budget {
                Err(Error::Parameter(format!("estimated {} MB exceeds the memory budget of {} MB", need >> 20, cfg.memory_budget_mb))
                    .at("sweep"))
            } else {
                run_experiment(&cfg)
            };
            match &result {
                Ok(rep) => {
                    let _ = table.push(rep.row.clone());
                }
                Err(e) => log::warn!("cell N = {n}, h = {h} failed: {e}"),
            }
            cells.push(SweepCell { h, n, result });
        }
    }
    (cells, table)
}
