use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("contour is not an immersion: min |γ′| = {min:e}, max |γ′| = {max:e}")]
    NotImmersed { min: f64, max: f64 },
    #[error("contour is not simple: samples {i} and {j} coincide")]
    SelfIntersecting { i: usize, j: usize },
    #[error("contour is clockwise (signed area {0:e})")]
    Clockwise(f64),
    #[error("degenerate tangent at t = {0}")]
    DegenerateTangent(f64),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point is within the boundary tolerance of contour {contour}")]
    Indeterminate { contour: usize },
    #[error("evaluation at or near a pole centred at ({re}, {im})")]
    Pole { re: f64, im: f64 },
    #[error("cauchy derivative estimate did not converge (discrepancy {0:e})")]
    CauchyNonConvergence(f64),
    #[error("derivative vanishes (|f′| = {0:e})")]
    VanishingDerivative(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("minimax solver did not converge: {0}")]
    SolverNonConvergence(String),
    #[error("ill-conditioned basis (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("domain is numerically degenerate: λ_m = {lambda:e}, diameter = {diameter:e}")]
    Degenerate { lambda: f64, diameter: f64 },
    #[error("zero bisection exceeded depth {0}")]
    BisectionDepth(usize),
    #[error("branch of the square root could not be resolved near z = ({re}, {im})")]
    BranchFailure { re: f64, im: f64 },
    #[error("step size collapsed near z = ({re}, {im})")]
    StepCollapse { re: f64, im: f64 },
    #[error("path meets a zero of φ′ near z = ({re}, {im})")]
    TurningPoint { re: f64, im: f64 },
    #[error("path crosses a Stokes arc (arc {arc})")]
    CrossesStokesArc { arc: usize },
    #[error("local series order mismatch: coefficient {order} has relative size {size:e}")]
    OrderMismatch { order: usize, size: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}
