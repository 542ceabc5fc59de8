// Copyright 2026 The myolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MYOLAB_PROMPTS_H_
#define MYOLAB_PROMPTS_H_

#include <map>
#include <string>
#include <string_view>

namespace myolab {

// Templates live in prompts/*.txt and are embedded at build time.
std::string_view selection_prompt_template();
std::string_view feedback_prompt_template();
std::string_view synthesis_prompt_template();

// Replaces every "{key}" with vars.at(key). Unknown placeholders are left
// in place so missing substitutions are visible in transcripts.
std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string>& vars);

}  // namespace myolab

#endif  // MYOLAB_PROMPTS_H_
