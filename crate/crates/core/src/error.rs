use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("disks {i} and {j} overlap: separation {separation} < contact distance {contact}")]
    Overlap {
        i: usize,
        j: usize,
        separation: f64,
        contact: f64,
    },

    #[error("disks {i} and {j} are not approaching; refusing to collide a separating pair")]
    Separating { i: usize, j: usize },

    #[error("disks {i} and {j} are not in contact (separation {separation}, contact {contact})")]
    NotInContact {
        i: usize,
        j: usize,
        separation: f64,
        contact: f64,
    },

    #[error("could not place {wanted} disks without overlap (placed {placed})")]
    Placement { placed: usize, wanted: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("design matrix is rank deficient: {0}")]
    RankDeficient(String),

    #[error("no crossing: {0}")]
    NoCrossing(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("degenerate ratio sampler: {0}")]
    DegenerateSampler(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("plot rendering failed: {0}")]
    Plot(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
