#include "multikink/errors.hpp"

namespace mk {

int exit_code(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::config:
        case ErrorCategory::argument:
            return 2;
        case ErrorCategory::numerical:
            return 3;
    }
    return 3;
}

}  // namespace mk
