/*
Copyright (c) 2026 The bbpgraph Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef BBP_BBP_HPP
#define BBP_BBP_HPP

#include "bbp/core.hpp"
#include "bbp/cost_model.hpp"
#include "bbp/engine.hpp"
#include "bbp/error.hpp"
#include "bbp/io.hpp"
#include "bbp/lanczos.hpp"
#include "bbp/ooc_vector.hpp"
#include "bbp/preprocess.hpp"
#include "bbp/program.hpp"
#include "bbp/programs.hpp"
#include "bbp/rmat.hpp"
#include "bbp/storage.hpp"
#include "bbp/tridiagonal.hpp"
#include "bbp/wcc.hpp"

#endif  // BBP_BBP_HPP
