#include "pbnet/trajectory.hpp"

#include "pbnet/error.hpp"

namespace pbnet {

void Trajectory::record(std::span<const BeliefVector> beliefs) {
  if (beliefs.size() != agents_) {
    throw Error(ErrorKind::Validation, "trajectory: snapshot has the wrong number of agents");
  }
  for (const auto& b : beliefs) {
    if (b.size() != hypotheses_) {
      throw Error(ErrorKind::Validation, "trajectory: snapshot has the wrong number of hypotheses");
    }
    const auto logs = b.logValues();
    logs_.insert(logs_.end(), logs.begin(), logs.end());
  }
}

}  // namespace pbnet
