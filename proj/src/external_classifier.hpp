#pragma once

#include <memory>

#include "consentscan/textclass.hpp"

namespace consentscan::textclass {

/// Line-protocol subprocess or HTTP endpoint, depending on the model descriptor.
std::unique_ptr<Classifier> make_external_classifier(const ClassifierModel& model);

} // namespace consentscan::textclass
