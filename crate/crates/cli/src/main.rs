mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{CustomProblem, NetworkFile};
use fracdg::assembly::{assemble_system, AssemblyError, AssemblyOptions};
use fracdg::mesh::{build_cut_mesh, write_dump, write_vtk, MeshOptions, PolygonalMesh, SubdomainRule, GEOMETRIC_TOLERANCE};
use fracdg::network::FractureNetwork;
use fracdg::solver::{solve, Method, SolverConfig, SolverError};
use fracdg::space::DgSpace;
use fracdg::verification::{
    run_convergence, solve_case, CaseId, CaseOverrides, ManufacturedCase, StudyOptions, VerificationError,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fracdg", version, about = "Interior-penalty DG for Darcy flow in fractured porous media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write the bulk/fracture solutions (and errors for builtin cases).
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Solve a builtin case on several meshes and write observed rates.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
    },
    /// Build the fracture-aligned mesh and write it as VTK and a text dump.
    Mesh {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverChoice {
    Cg,
    Chol,
}

#[derive(Args)]
struct Common {
    /// Builtin case (example1a … example4b) or a network JSON file.
    #[arg(long)]
    case: Option<String>,
    /// Network JSON: fracture coefficients for a builtin case, or a standalone problem.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long, default_value_t = 10.0)]
    sigma0: f64,
    #[arg(long = "sigma0-gamma", default_value_t = 10.0)]
    sigma0_gamma: f64,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long, value_enum)]
    solver: Option<SolverChoice>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 1,
        }
    }
}

impl From<VerificationError> for Failure {
    fn from(e: VerificationError) -> Self {
        match &e {
            VerificationError::Solver(SolverError::InvalidConfig(_))
            | VerificationError::Assembly(AssemblyError::InvalidPenalty { .. } | AssemblyError::Network(_))
            | VerificationError::Case(_)
            | VerificationError::Mesh(_)
            | VerificationError::TooFewLevels(_) => Failure::Config(e.to_string()),
            VerificationError::Assembly(_) | VerificationError::Solver(_) => Failure::Numeric(e.to_string()),
        }
    }
}

enum Problem {
    Case(Box<ManufacturedCase>),
    Custom(CustomProblem),
}

fn check_xi(xi: Option<f64>) -> Result<(), Failure> {
    match xi {
        Some(v) if !(v > 0.5 && v.is_finite()) => {
            Err(Failure::Config(format!("xi: closure parameter ξ = {v} must satisfy ξ > 1/2")))
        }
        _ => Ok(()),
    }
}

fn check_n(n: usize) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Config(format!("n: need at least 2 subdivisions, got {n}")));
    }
    Ok(())
}

impl Common {
    fn validate(&self) -> Result<(), Failure> {
        if !(1..=4).contains(&self.degree) {
            return Err(Failure::Config(format!("degree: k = {} must lie in [1, 4]", self.degree)));
        }
        for (name, v) in [("sigma0", self.sigma0), ("sigma0-gamma", self.sigma0_gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Config(format!("{name}: penalty {v} must be positive")));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(Failure::Config(format!("tol: {t} must lie in (0, 1)")));
            }
        }
        check_xi(self.xi)
    }

    fn study(&self) -> StudyOptions {
        let defaults = SolverConfig::default();
        StudyOptions {
            degree: self.degree,
            assembly: AssemblyOptions {
                sigma0: self.sigma0,
                sigma0_gamma: self.sigma0_gamma,
                ..AssemblyOptions::default()
            },
            solver: SolverConfig {
                method: self.solver.map(|s| match s {
                    SolverChoice::Cg => Method::Cg,
                    SolverChoice::Chol => Method::Cholesky,
                }),
                tol: self.tol.unwrap_or(defaults.tol),
                ..defaults
            },
        }
    }

    /// Flags override the network file, which overrides the builtin defaults.
    fn problem(&self) -> Result<Problem, Failure> {
        self.validate()?;
        let mut network_path = self.network.clone();
        let mut builtin = None;
        if let Some(case) = &self.case {
            match case.parse::<CaseId>() {
                Ok(id) => builtin = Some(id),
                Err(e) => {
                    if Path::new(case).is_file() && network_path.is_none() {
                        network_path = Some(PathBuf::from(case));
                    } else {
                        return Err(Failure::Config(format!("case: {e}")));
                    }
                }
            }
        }
        let file = network_path.as_deref().map(NetworkFile::load).transpose().map_err(Failure::Config)?;
        let file_xi = file.as_ref().and_then(|f| f.xi);
        check_xi(file_xi)?;
        let xi = self.xi.or(file_xi);
        match (builtin, file) {
            (Some(id), file) => {
                let overrides = CaseOverrides { xi, fractures: file.map(|f| f.fractures()) };
                let case = id.build_with(&overrides).map_err(|e| Failure::Config(format!("case: {e}")))?;
                Ok(Problem::Case(Box::new(case)))
            }
            (None, Some(file)) => {
                let domain = file.domain().map_err(Failure::Config)?;
                let network = FractureNetwork::new(file.fractures());
                network
                    .validate(GEOMETRIC_TOLERANCE * domain.diameter())
                    .map_err(|e| Failure::Config(format!("network: {e}")))?;
                let xi = xi.unwrap_or(AssemblyOptions::default().xi);
                Ok(Problem::Custom(CustomProblem {
                    domain,
                    network,
                    neumann_sides: file.neumann_sides.clone(),
                    xi,
                    bulk_source: file.bulk_source,
                    fracture_source: file.fracture_source,
                    dirichlet: file.dirichlet,
                }))
            }
            (None, None) => Err(Failure::Config("case: one of --case or --network is required".into())),
        }
    }
}

fn prepare_out(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("out: cannot create {}: {e}", dir.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    output::write_atomic(&path, contents.as_bytes())
        .map_err(|e| Failure::Config(format!("out: cannot write {}: {e}", path.display())))
}

fn custom_mesh(p: &CustomProblem, n: usize, degree: usize) -> Result<PolygonalMesh, Failure> {
    let options = MeshOptions {
        degree,
        fracture_degree: degree,
        neumann_sides: &p.neumann_sides,
        subdomains: SubdomainRule::SidePattern,
    };
    build_cut_mesh(p.domain, &p.network, n, &options).map_err(|e| Failure::Config(format!("network: {e}")))
}

fn cmd_solve(common: &Common, n: usize) -> Result<(), Failure> {
    check_n(n)?;
    let problem = common.problem()?;
    let opts = common.study();
    prepare_out(&common.out)?;
    let (mesh, space, x, report, errors) = match &problem {
        Problem::Case(case) => {
            let s = solve_case(case, n, &opts)?;
            (s.mesh, s.space, s.x, s.solve, Some(s.errors))
        }
        Problem::Custom(p) => {
            let mesh = custom_mesh(p, n, opts.degree)?;
            let space = DgSpace::new(&mesh);
            let assembly = AssemblyOptions { xi: p.xi, ..opts.assembly };
            let (system, _) = assemble_system(&mesh, &space, &p.network, p, &assembly)
                .map_err(|e| Failure::from(VerificationError::from(e)))?;
            let method = opts.solver.method_for(n);
            let (x, report) = solve(&system.matrix, &system.rhs, &system.blocks, method, &opts.solver)
                .map_err(|e| Failure::from(VerificationError::from(e)))?;
            (mesh, space, x, report, None)
        }
    };
    write(&common.out, "solution_bulk.vtk", &output::solution_vtk(&mesh, &space, &x))?;
    write(&common.out, "solution_frac.csv", &output::fracture_csv(&mesh, &space, &x))?;
    println!(
        "dofs {} (bulk {}, fracture {}), solver {:?}, iterations {}, relative residual {:.3e}",
        space.dofs.total(),
        space.dofs.n_bulk,
        space.dofs.n_frac,
        report.method.unwrap_or(Method::Cholesky),
        report.iterations,
        report.residual
    );
    if let Some(errors) = errors {
        let csv = output::errors_csv(&errors);
        write(&common.out, "errors.csv", &csv)?;
        print!("{csv}");
    }
    Ok(())
}

fn cmd_convergence(common: &Common, levels: &[usize]) -> Result<(), Failure> {
    if levels.len() < 2 {
        return Err(Failure::Config(format!("levels: need ≥ 2 levels, got {}", levels.len())));
    }
    for &n in levels {
        check_n(n)?;
    }
    let Problem::Case(case) = common.problem()? else {
        return Err(Failure::Config("case: convergence studies need a builtin manufactured case".into()));
    };
    prepare_out(&common.out)?;
    match run_convergence(&case, levels, &common.study()) {
        Ok(table) => {
            let csv = table.to_csv();
            write(&common.out, "rates.csv", &csv)?;
            print!("{csv}");
            Ok(())
        }
        Err(failure) => {
            if !failure.partial.rows.is_empty() {
                eprint!("{}", failure.partial.to_csv());
            }
            let mut f = Failure::from(failure.error);
            let (Failure::Numeric(m) | Failure::Config(m)) = &mut f;
            *m = format!("level n = {}: {m}", failure.level);
            Err(f)
        }
    }
}

fn cmd_mesh(common: &Common, n: usize) -> Result<(), Failure> {
    check_n(n)?;
    let mesh = match common.problem()? {
        Problem::Case(case) => case.mesh(n, common.degree).map_err(|e| Failure::Config(format!("case: {e}")))?,
        Problem::Custom(p) => custom_mesh(&p, n, common.degree)?,
    };
    prepare_out(&common.out)?;
    let mut vtk = Vec::new();
    let mut dump = Vec::new();
    write_vtk(&mesh, &mut vtk).and_then(|_| write_dump(&mesh, &mut dump)).map_err(|e| Failure::Numeric(e.to_string()))?;
    write(&common.out, "mesh.vtk", &String::from_utf8_lossy(&vtk))?;
    write(&common.out, "mesh.txt", &String::from_utf8_lossy(&dump))?;
    print!("{}", output::counts_text(&mesh));
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("FRACDG_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Config(format!("FRACDG_THREADS: expected a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Config(format!("FRACDG_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Solve { common, n } => cmd_solve(common, *n),
        Command::Convergence { common, levels } => cmd_convergence(common, levels),
        Command::Mesh { common, n } => cmd_mesh(common, *n),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(m) | Failure::Numeric(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
