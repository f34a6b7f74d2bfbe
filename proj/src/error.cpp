#include "aicarbon/error.h"

namespace aicarbon {

ExitCode exit_code_for(const std::exception& e) noexcept
{
    if (dynamic_cast<const ConfigError*>(&e)) {
        return ExitCode::Config;
    }
    if (dynamic_cast<const IngestError*>(&e)) {
        return ExitCode::Ingest;
    }
    return ExitCode::Computation;
}

}
