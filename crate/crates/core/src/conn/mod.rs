//! λ-connections on free modules, ε-transport between square-zero close
//! pullbacks, and first-order horizontal lifts.

pub mod connection;
pub mod lift;
pub mod transport;

pub use connection::{curvature, is_integrable, CurvatureTensor, LambdaConnection};
pub use lift::{check_lift, horizontal_lift, Distribution, LiftReport, Tangent};
pub use transport::{
    epsilon_transport, intertwining, pullback_connection, verify_triangle, EpsilonTransport, IntertwiningReport,
};
