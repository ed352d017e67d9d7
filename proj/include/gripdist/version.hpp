#pragma once

#define GRIPDIST_VERSION "1.0.0"
