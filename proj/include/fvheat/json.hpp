// json.hpp: Single include point for the vendored JSON library

#pragma once

#include <json.hpp>
