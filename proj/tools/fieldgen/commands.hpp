#pragma once

#include "config.hpp"

namespace fieldgen::cli {

int cmd_train_gen(json cfg);
int cmd_sample(json cfg);
int cmd_eval(json cfg);
int cmd_fp_verify(json cfg);
int cmd_rl(json cfg);
int cmd_ablate(json cfg);

}  // namespace fieldgen::cli
