#include <cstdlib>
#include <string_view>

#include "caf/kernels.hpp"

namespace caf::kernels {
namespace {

const Ops* pick_default() {
    if (const char* env = std::getenv("CAF_KERNEL_BACKEND")) {
        std::string_view want(env);
        if (want == "scalar") return &scalar_ops();
        if (want == "avx2" && avx2_ops()) return avx2_ops();
    }
    if (const Ops* a = avx2_ops()) return a;
    return &scalar_ops();
}

const Ops*& current() {
    static const Ops* ops = pick_default();
    return ops;
}

}  // namespace

const Ops& active() { return *current(); }

bool set_backend(std::string_view name) {
    if (name == "scalar") {
        current() = &scalar_ops();
        return true;
    }
    if (name == "avx2") {
        if (const Ops* a = avx2_ops()) {
            current() = a;
            return true;
        }
        return false;
    }
    return false;
}

}  // namespace caf::kernels
