#include "tipping/crisis/ensemble.hpp"

#include "tipping/util/error.hpp"

namespace tipping {

void EnsembleSpec::validate() const {
    hyper.validate();
    if (members < 1) throw config_error("ensemble: need at least one member");
    if (!seeds.empty() && seeds.size() != members) throw config_error("ensemble: explicit seed count must equal member count");
}

WarmupPool::WarmupPool(TimeSeries reference, std::size_t segment_length)
    : reference_(std::move(reference)), segment_length_(segment_length) {
    if (segment_length_ < 1 || reference_.length() < segment_length_)
        throw data_error("warmup pool: reference is shorter than one warmup segment");
}

TimeSeries WarmupPool::draw(Rng& rng) const {
    const std::size_t offset = rng.below(reference_.length() - segment_length_ + 1);
    return reference_.slice(offset, segment_length_);
}

}  // namespace tipping
