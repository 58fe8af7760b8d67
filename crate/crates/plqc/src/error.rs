use crate::qstate::PhotonId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("photon {0} has been lost")]
    PhotonLost(PhotonId),
    #[error("photon {0} has already been measured")]
    PhotonMeasured(PhotonId),
    #[error("unknown photon {0}")]
    UnknownPhoton(PhotonId),
    #[error("fusion needs two distinct photons, got {0} twice")]
    SamePhoton(PhotonId),
    #[error("blocks share photon {0}")]
    Overlap(PhotonId),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("capacity exceeded: {requested} present photons, limit {limit}")]
    Capacity { requested: usize, limit: usize },
    #[error("forced outcome `{0}` has zero probability")]
    ImpossibleOutcome(String),
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("retry budget exhausted after {0} attempts")]
    Budget(usize),
    #[error("protocol reported success with logical fidelity {0}")]
    Fidelity(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
